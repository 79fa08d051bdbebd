"""Exception hierarchy shared by every engine.

``EngineError`` subclasses signal runtime failures of a numerical engine
(exit code 1 at the CLI); ``UsageError`` signals invalid input before any
computation starts (exit code 2).
"""


class EngineError(Exception):
    """Base class for engine failures."""


class NonConvergence(EngineError):
    """Root finder exceeded its sweep budget; input is ill-conditioned."""


class DegreeCapExceeded(EngineError):
    """A symbolic iterate would exceed the supported polynomial degree."""


class DepthCapExceeded(EngineError):
    """A preimage tree would exceed the supported branch count."""


class DivergedOrbit(EngineError):
    """An orbit left the disk on which the conjugacy construction is valid."""


class BranchAmbiguity(EngineError):
    """Two root branches are equidistant from the tracking reference."""


class NotInBasin(EngineError):
    """The starting point does not converge to the required fixed point."""


class NonSummable(EngineError):
    """Right-hand side does not vanish at the fixed point; series diverges."""


class NoConvergence(EngineError):
    """Infinite matrix product fails to settle within the iteration budget."""


class NoRepellingFixedPoint(EngineError):
    """Map has no repelling fixed point to seed backward iteration."""


class EmptyCloud(EngineError):
    """A point-cloud operation received an empty cloud."""


class UsageError(Exception):
    """Invalid command-line or config input (maps to exit code 2)."""

"""Iteration of polynomial and rational maps on the Riemann sphere:
superattracting conjugacies, functional-equation solvers, periodic-point
analysis, and Julia-set sampling/rendering engines.

The hot kernels run on a compiled core when available; see
boettcher._kernels.backend_name().
"""

from ._kernels import available_backends, backend_name
from .cycles import (ATTRACTING, IRRATIONALLY_NEUTRAL, RATIONALLY_NEUTRAL,
                     REPELLING, SUPERATTRACTING, Cycle, NonRepellingReport,
                     PreperiodicRecord, classify, count_nonrepelling_cycles,
                     is_preperiodic, misiurewicz_check, multiplier,
                     periodic_points, poly_roots)
from .errors import (BranchAmbiguity, DegreeCapExceeded, DepthCapExceeded,
                     DivergedOrbit, EmptyCloud, EngineError, NoConvergence,
                     NonConvergence, NonSummable, NoRepellingFixedPoint,
                     NotInBasin, UsageError)
from .funceq import (BoettcherChart, LinearSystemSolution, PowerSeries,
                     SuperattractingGerm, abel_solve, boettcher_at_infinity,
                     boettcher_chart, boettcher_limit, boettcher_series,
                     green_function, green_values, koenigs_linearizer,
                     linear_system_solve, normalize_superattracting)
from .julia import (ChaoticReport, DensityReport, EscapeGrid, PointCloud,
                    Viewport, basin_backward, basin_level_sizes,
                    chaotic_probe, chebyshev_like, connectivity_probe,
                    escape_time_grid, hausdorff_distance, inverse_iteration,
                    lattes_example, monomial, periodic_density_report,
                    quadratic, sphere_cover_fraction)
from .maps import (Orbit, Polynomial, RationalMap, as_rational,
                   critical_points, escape_radius, eval_sphere, iterate,
                   iterate_polynomial)
from .sphere import (INFINITY, SpherePoint, chordal_distance, is_infinity,
                     principal_root, tracked_root)

__version__ = "0.1.0"

"""Command-line front end.

One subcommand per engine.  Numeric output carries 17 significant digits,
files are written atomically, and every run ends with a single-line JSON
summary on stdout.  Exit codes: 0 success, 1 engine error, 2 usage error.

Complex values on the command line are "re,im"; polynomials are
space-separated coefficient pairs from the constant term upward
("0,0 0,0 1,0" is z^2); rational maps are "num | den"; germs accept a
monomial-sum syntax like "z^2+0.1z^4".
"""

from __future__ import annotations

import argparse
import re
import sys
import time

import numpy as np

from . import __version__
from ._kernels import backend_name
from .cycles import (count_nonrepelling_cycles, misiurewicz_check,
                     periodic_points)
from .errors import EngineError, UsageError
from .formats import atomic_write_bytes, atomic_write_text, cloud_csv, dumps_json, ppm_bytes
from .funceq import (SuperattractingGerm, abel_with_count, boettcher_chart,
                     koenigs_with_count, linear_system_solve)
from .julia import (Viewport, basin_backward, chaotic_probe, chebyshev_like,
                    connectivity_probe, escape_time_grid, inverse_iteration,
                    lattes_example, monomial, periodic_density_report,
                    quadratic, resolve_threads)
from .maps import COMPOSE_DEGREE_CAP, Polynomial, RationalMap, as_rational


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"complex value must be 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise UsageError(f"bad complex value {text!r}: {exc}") from None


def parse_polynomial(text: str) -> Polynomial:
    pairs = text.split()
    if not pairs:
        raise UsageError("empty polynomial")
    return Polynomial([parse_complex(p) for p in pairs])


def parse_map(text: str) -> RationalMap:
    if "|" in text:
        num_text, den_text = text.split("|", 1)
        num = parse_polynomial(num_text.strip())
        den = parse_polynomial(den_text.strip())
        try:
            return RationalMap(num, den)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    poly = parse_polynomial(text)
    try:
        return as_rational(poly)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


_TERM_RE = re.compile(
    r"^(?P<coef>\((?P<re>[^,()]+),(?P<im>[^,()]+)\)|[0-9.]+(?:[eE][+-]?[0-9]+)?)?"
    r"\*?(?P<z>z(?:\^(?P<pow>[0-9]+))?)?$")


def parse_germ(text: str) -> SuperattractingGerm:
    """Monomial-sum syntax: 'z^2+z^3', '0.5z^2', '(0,1)z^3', '-8z^3'."""
    s = text.replace(" ", "")
    if not s:
        raise UsageError("empty germ expression")
    terms = []
    buf = ""
    sign = 1.0
    pending_sign = 1.0
    depth = 0
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and buf and buf[-1] not in "eE(,":
            terms.append((sign, buf))
            buf = ""
            sign = -1.0 if ch == "-" else 1.0
            continue
        if not buf and ch in "+-" and depth == 0:
            sign *= -1.0 if ch == "-" else 1.0
            continue
        buf += ch
    if buf:
        terms.append((sign, buf))
    coeffs: dict[int, complex] = {}
    for sgn, term in terms:
        m = _TERM_RE.match(term)
        if not m or (m.group("coef") is None and m.group("z") is None):
            raise UsageError(f"cannot parse germ term {term!r}")
        if m.group("re") is not None:
            coef = complex(float(m.group("re")), float(m.group("im")))
        elif m.group("coef"):
            coef = complex(float(m.group("coef")), 0.0)
        else:
            coef = 1.0 + 0j
        if m.group("z"):
            power = int(m.group("pow")) if m.group("pow") else 1
        else:
            power = 0
        coeffs[power] = coeffs.get(power, 0j) + sgn * coef
    top = max(coeffs)
    dense = [coeffs.get(k, 0j) for k in range(top + 1)]
    try:
        return SuperattractingGerm(Polynomial(dense))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_map_options(sub, *, lattes=False, quadratic_only=False):
    grp = sub.add_mutually_exclusive_group()
    if not quadratic_only:
        grp.add_argument("--map", help="polynomial or 'num | den' coefficient pairs")
        grp.add_argument("--map-file", help="file containing a map in --map syntax")
        grp.add_argument("--monomial", type=int, help="the map z^M")
        grp.add_argument("--chebyshev", type=int,
                         help="degree-D Chebyshev-like map on [-2, 2]")
    grp.add_argument("--quadratic-c", help="the map z^2 + c with c = 're,im'")
    if lattes:
        grp.add_argument("--lattes", action="store_true",
                         help="the elliptic doubling map (z^2+1)^2/(4z(z^2-1))")


def _resolve_map(args, *, polynomial_only=False) -> RationalMap:
    if getattr(args, "map", None):
        f = parse_map(args.map)
    elif getattr(args, "map_file", None):
        try:
            with open(args.map_file, "r", encoding="utf-8") as fh:
                f = parse_map(fh.read().strip())
        except OSError as exc:
            raise UsageError(f"cannot read map file: {exc}") from None
    elif getattr(args, "monomial", None) is not None:
        if args.monomial < 2:
            raise UsageError("--monomial needs M >= 2")
        f = as_rational(monomial(args.monomial))
    elif getattr(args, "chebyshev", None) is not None:
        if args.chebyshev < 2:
            raise UsageError("--chebyshev needs D >= 2")
        f = as_rational(chebyshev_like(args.chebyshev))
    elif getattr(args, "quadratic_c", None):
        f = as_rational(quadratic(parse_complex(args.quadratic_c)))
    elif getattr(args, "lattes", False):
        f = lattes_example()
    else:
        raise UsageError("no map given (use --map/--map-file/--monomial/"
                         "--chebyshev/--quadratic-c)")
    if polynomial_only and not f.is_polynomial:
        raise UsageError("this command needs a polynomial map")
    return f


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boettcher",
        description="Julia sets, superattracting conjugacies, and "
                    "functional-equation solvers for iterated maps.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--config", help="key = value defaults file")
        sub.add_argument("--threads", type=int, help="worker cap (default: cores)")
        sub.add_argument("--out", help="output file path")

    p = subs.add_parser("render", help="escape-time raster as binary PPM")
    _add_map_options(p)
    p.add_argument("--center", default="0,0")
    p.add_argument("--half", type=float, default=1.6, help="half-width")
    p.add_argument("--half-y", type=float, help="half-height (default: aspect)")
    p.add_argument("--px", type=int, default=800)
    p.add_argument("--py", type=int, default=800)
    p.add_argument("--max-iter", type=int, default=256)
    common(p)

    p = subs.add_parser("julia-sample", help="inverse-iteration point cloud as CSV")
    _add_map_options(p, lattes=True)
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--burn-in", type=int, default=64)
    p.add_argument("--seed", type=int, default=1)
    common(p)

    p = subs.add_parser("basin", help="backward preimage tree of a basin circle")
    _add_map_options(p)
    p.add_argument("--attractor", required=False, default=None, help="'re,im'")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--radius", type=float, default=0.1)
    p.add_argument("--circle-samples", type=int, default=64)
    common(p)

    p = subs.add_parser("cycles", help="periodic cycles with multipliers")
    _add_map_options(p)
    p.add_argument("--max-period", type=int, default=4)
    common(p)

    p = subs.add_parser("density", help="periodic-point density on a model boundary")
    _add_map_options(p)
    p.add_argument("--max-period", type=int, default=6)
    common(p)

    p = subs.add_parser("boettcher", help="conjugacy chart at a superattracting point")
    p.add_argument("--germ", required=True, help="e.g. 'z^2+z^3'")
    p.add_argument("--order", type=int, default=16)
    p.add_argument("--r-test", type=float, default=0.05)
    common(p)

    p = subs.add_parser("koenigs", help="linearizer at an attracting fixed point")
    _add_map_options(p)
    p.add_argument("--alpha", required=True, help="'re,im' fixed point")
    p.add_argument("--z", required=True, help="'re,im' evaluation point")
    p.add_argument("--n-max", type=int, default=512)
    common(p)

    p = subs.add_parser("abel", help="solve psi(f(z)) - psi(z) = g(z)")
    _add_map_options(p)
    p.add_argument("--g", required=True, help="right-hand side polynomial")
    p.add_argument("--alpha", required=True, help="'re,im' fixed point")
    p.add_argument("--z", required=True, help="'re,im' evaluation point")
    p.add_argument("--n-max", type=int, default=100000)
    common(p)

    p = subs.add_parser("linsys", help="linear system U(z) = A(z) U(F(z))")
    _add_map_options(p)
    p.add_argument("--system", required=True,
                   help="rows '|'-separated, entries ';'-separated polynomials")
    p.add_argument("--seed-vector", required=True, help="'re,im ; re,im ; ...'")
    p.add_argument("--z", required=True, help="'re,im' evaluation point")
    p.add_argument("--n-max", type=int, default=100000)
    common(p)

    p = subs.add_parser("misiurewicz", help="preperiodicity of the critical orbit of z^2+c")
    p.add_argument("--c", required=True, help="'re,im'")
    p.add_argument("--max-pre", type=int, default=64)
    p.add_argument("--max-period", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)

    p = subs.add_parser("chaotic-probe", help="everywhere-chaotic two-part test")
    _add_map_options(p, lattes=True)
    p.add_argument("--max-period", type=int, default=4)
    p.add_argument("--n", type=int, default=1000000)
    p.add_argument("--seed", type=int, default=1)
    common(p)

    p = subs.add_parser("connectivity", help="connected/dust verdict for z^2+c")
    p.add_argument("--c", required=True, help="'re,im'")
    p.add_argument("--max-iter", type=int, default=512)
    common(p)
    return parser


def _load_config_tokens(path: str) -> list[str]:
    tokens = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (s.strip() for s in line.split("=", 1))
                if not key:
                    raise UsageError(f"{path}:{lineno}: empty key")
                if value.lower() in ("true", "yes", "on"):
                    tokens.append(f"--{key}")
                elif value.lower() in ("false", "no", "off"):
                    pass
                else:
                    tokens.extend([f"--{key}", value])
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    return tokens


def _merge_config(argv: list[str]) -> list[str]:
    """Insert config-file tokens right after the subcommand; flags override
    them because argparse keeps the last occurrence."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    tokens = _load_config_tokens(argv[idx + 1])
    return argv[:1] + tokens + argv[1:]


def _parse_system(text: str) -> list[list[Polynomial]]:
    rows = [r.strip() for r in text.split("|")]
    out = []
    for row in rows:
        entries = [e.strip() for e in row.split(";")]
        out.append([parse_polynomial(e) for e in entries])
    n = len(out)
    if any(len(r) != n for r in out):
        raise UsageError("system matrix must be square")
    return out


def _require_out(args):
    if not args.out:
        raise UsageError("--out is required for this command")


def _run_render(args):
    f = _resolve_map(args, polynomial_only=True)
    _require_out(args)
    if args.px < 1 or args.py < 1 or args.max_iter < 1:
        raise UsageError("--px, --py, --max-iter must be positive")
    center = parse_complex(args.center)
    half_y = args.half_y if args.half_y is not None else args.half * args.py / args.px
    viewport = Viewport(center, args.half, half_y, args.px, args.py)

    def compute():
        grid = escape_time_grid(f.poly(), viewport, args.max_iter,
                                threads=resolve_threads(args.threads))
        atomic_write_bytes(args.out, ppm_bytes(grid))
        bounded = float((grid.data > args.max_iter).mean())
        return [args.out], bounded
    return compute


def _run_julia_sample(args):
    f = _resolve_map(args)
    _require_out(args)
    if args.n < 1:
        raise UsageError("--n must be positive")

    def compute():
        cloud = inverse_iteration(f, args.n, burn_in=args.burn_in,
                                  rng_seed=args.seed)
        atomic_write_text(args.out, cloud_csv(cloud))
        return [args.out], len(cloud)
    return compute


def _polish_fixed_point(p, alpha):
    """Newton-tighten a user-supplied fixed point; engines validate strictly."""
    dp = p.derivative()
    for _ in range(50):
        g = p(alpha) - alpha
        dg = dp(alpha) - 1.0
        if abs(dg) < 1e-14 or abs(g) > 1.0:
            break
        step = g / dg
        alpha -= step
        if abs(step) <= 1e-15 * (1.0 + abs(alpha)):
            break
    return alpha


def _run_basin(args):
    f = _resolve_map(args, polynomial_only=True)
    _require_out(args)
    if args.attractor is None:
        raise UsageError("--attractor is required")
    alpha = _polish_fixed_point(f.poly(), parse_complex(args.attractor))
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")

    def compute():
        cloud = basin_backward(f.poly(), alpha, args.depth,
                               radius=args.radius,
                               circle_samples=args.circle_samples)
        atomic_write_text(args.out, cloud_csv(cloud))
        outer = cloud.points[-args.circle_samples * f.degree ** args.depth:]
        return [args.out], float(np.abs(outer - alpha).mean())
    return compute


def _check_period_cap(f, max_period):
    if max_period < 1:
        raise UsageError("--max-period must be >= 1")
    if f.degree ** max_period > COMPOSE_DEGREE_CAP:
        raise UsageError(
            f"period cap exceeded: {f.degree}^{max_period} > {COMPOSE_DEGREE_CAP}")


def _run_cycles(args):
    f = _resolve_map(args)
    _check_period_cap(f, args.max_period)

    def compute():
        report = []
        for period in range(1, args.max_period + 1):
            for cyc in periodic_points(f, period):
                report.append({
                    "points": list(cyc.points),
                    "period": cyc.period,
                    "multiplier": cyc.multiplier,
                    "class": cyc.classification,
                })
        nonrep = count_nonrepelling_cycles(f, args.max_period)
        doc = {"cycles": report, "nonrepelling_count": nonrep.count,
               "critical_bound": nonrep.bound}
        paths = _write_report(args, doc)
        return paths, len(report)
    return compute


def _run_density(args):
    f = _resolve_map(args, polynomial_only=True)
    _check_period_cap(f, args.max_period)
    poly = f.poly()

    def compute():
        rep = periodic_density_report(poly, args.max_period)
        doc = {"model": rep.model, "rows": [
            {"period": r.period, "count": r.count,
             "max_distance": r.max_distance, "max_gap": r.max_gap}
            for r in rep.rows]}
        paths = _write_report(args, doc)
        return paths, max(r.max_distance for r in rep.rows)
    return compute


def _run_boettcher(args):
    germ = parse_germ(args.germ)
    if args.order < 1:
        raise UsageError("--order must be >= 1")

    def compute():
        chart = boettcher_chart(germ, order=args.order, r_test=args.r_test)
        doc = {"series": list(chart.series.coeffs), "scale": chart.scale,
               "residual": chart.residual, "order": chart.order,
               "r_test": chart.r_test}
        paths = _write_report(args, doc)
        return paths, chart.residual
    return compute


def _run_koenigs(args):
    f = _resolve_map(args)
    alpha = parse_complex(args.alpha)
    z = parse_complex(args.z)

    def compute():
        value, iters = koenigs_with_count(f, alpha, z, n_max=args.n_max)
        lam = f.derivative_value(alpha)
        fz = f(z)
        value_fz, _ = koenigs_with_count(f, alpha, fz, n_max=args.n_max)
        residual = abs(value_fz - lam * value)
        doc = {"value": value, "residual": residual, "iterations": iters,
               "multiplier": lam}
        paths = _write_report(args, doc)
        return paths, residual
    return compute


def _run_abel(args):
    f = _resolve_map(args)
    g = parse_polynomial(args.g)
    alpha = parse_complex(args.alpha)
    z = parse_complex(args.z)

    def compute():
        value, iters = abel_with_count(f, g, alpha, z, n_max=args.n_max)
        fz = f(z)
        value_fz, _ = abel_with_count(f, g, alpha, fz, n_max=args.n_max)
        residual = abs(value_fz - value - g(z))
        doc = {"value": value, "residual": residual, "iterations": iters}
        paths = _write_report(args, doc)
        return paths, residual
    return compute


def _run_linsys(args):
    f = _resolve_map(args)
    system = _parse_system(args.system)
    seed = [parse_complex(s.strip()) for s in args.seed_vector.split(";")]
    if len(seed) != len(system):
        raise UsageError("seed vector length must match the system size")
    z = parse_complex(args.z)

    def compute():
        sol = linear_system_solve(system, f, z, seed, n_max=args.n_max)
        doc = {"values": list(sol.values), "residual": sol.residual,
               "iterations": sol.iterations}
        paths = _write_report(args, doc)
        return paths, sol.residual
    return compute


def _run_misiurewicz(args):
    c = parse_complex(args.c)
    if args.max_pre < 1 or args.max_period < 1:
        raise UsageError("--max-pre and --max-period must be >= 1")

    def compute():
        rec = misiurewicz_check(c, args.max_pre, args.max_period, args.tol)
        if rec is None:
            doc = {"misiurewicz": False}
            stat = None
        else:
            doc = {"misiurewicz": True, "preperiod": rec.preperiod,
                   "period": rec.period}
            stat = rec.preperiod
        paths = _write_report(args, doc)
        return paths, stat
    return compute


def _run_chaotic_probe(args):
    f = _resolve_map(args)
    _check_period_cap(f, args.max_period)
    if args.n < 1:
        raise UsageError("--n must be positive")

    def compute():
        rep = chaotic_probe(f, max_period=args.max_period, n_samples=args.n,
                            rng_seed=args.seed)
        doc = {"no_nonrepelling": rep.no_nonrepelling,
               "cover_fraction": rep.cover_fraction,
               "chaotic_candidate": rep.chaotic_candidate,
               "max_period": rep.max_period, "n_samples": rep.n_samples}
        paths = _write_report(args, doc)
        return paths, rep.cover_fraction
    return compute


def _run_connectivity(args):
    c = parse_complex(args.c)
    if args.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")

    def compute():
        verdict = connectivity_probe(c, args.max_iter)
        paths = _write_report(args, {"verdict": verdict})
        return paths, verdict
    return compute


def _write_report(args, doc) -> list[str]:
    text = dumps_json(doc, indent=2) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        return [args.out]
    sys.stdout.write(text)
    return []


_RUNNERS = {
    "render": _run_render,
    "julia-sample": _run_julia_sample,
    "basin": _run_basin,
    "cycles": _run_cycles,
    "density": _run_density,
    "boettcher": _run_boettcher,
    "koenigs": _run_koenigs,
    "abel": _run_abel,
    "linsys": _run_linsys,
    "misiurewicz": _run_misiurewicz,
    "chaotic-probe": _run_chaotic_probe,
    "connectivity": _run_connectivity,
}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ['--c', '-2,0'] into ['--c=-2,0'] so argparse accepts negatives."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt
                and len(nxt) >= 2 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _join_negative_values(_merge_config(argv))
        args = parser.parse_args(argv)
        compute = _RUNNERS[args.command](args)  # full validation happens here
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        t0 = time.perf_counter()
        paths, stat = compute()
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
    except EngineError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # engine precondition violations are input problems, not failures
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    summary = {"command": args.command, "elapsed_ms": elapsed_ms,
               "output_paths": paths, "residual_or_stat": stat,
               "backend": backend_name()}
    sys.stdout.write(dumps_json(summary) + "\n")
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

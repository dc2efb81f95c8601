"""Command line interface: ``distavoid <command> ...``.

Exit codes: 0 success, 1 a verification or empirical check failed,
2 bad input or configuration, 3 an enumeration or factoring budget ran out.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import __version__
from .builder import Budgets, build
from .certify import certify
from .decay import FSpec
from .errors import BudgetExceeded, CertificationError, ConfigError, DistAvoidError, ManifestError, NonExactNormError
from .manifest_io import dumps, read_manifest, write_manifest, write_text_atomic
from .norms import NormSpec
from .oracle import SamplerConfig, mc_density, pair_margin, sample_points, thickened_lattice_demo
from .render import render
from .scale import Scale, format_rational, parse_rational, unlimited_int_digits
from .spectrum import DEFAULT_ENUM_BUDGET, find_gap, spectrum_window, verify_gap
from .arith import DEFAULT_FACTOR_BUDGET

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scale(text: str) -> Scale:
    try:
        return Scale.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _budget_flags(p):
    p.add_argument("--budget-enum", type=int, default=DEFAULT_ENUM_BUDGET, metavar="N",
                   help="maximum lattice points examined per enumeration (default %(default)s)")
    p.add_argument("--budget-factor", type=int, default=DEFAULT_FACTOR_BUDGET, metavar="N",
                   help="Pollard-Brent iteration budget per factorization (default %(default)s)")


def _sampling_flags(p, manifest=True):
    if manifest:
        p.add_argument("--manifest", required=True, help="manifest file written by 'construct'")
    p.add_argument("--seed", type=int, default=0, help="random seed (default %(default)s)")
    p.add_argument("--samples", type=int, default=10_000, help="number of samples or pairs (default %(default)s)")
    p.add_argument("--stage", type=int, default=None, help="restrict to one stage")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="distavoid", description="Build, certify and probe distance-avoiding sets.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log planning decisions to stderr")
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("construct", help="plan and certify a finite-stage construction")
    p.add_argument("--dim", type=int, required=True, help="dimension d")
    p.add_argument("--norm", required=True, help="l1, l2, linf, lp:<p> or poly:[(a,b),...]")
    p.add_argument("--f", required=True, dest="f", help="inv_poly:<alpha>, inv_log or step:[(R,v),...]")
    p.add_argument("--stages", type=int, required=True, help="number of stages")
    p.add_argument("--out", required=True, help="manifest path (written atomically)")
    _budget_flags(p)

    p = sub.add_parser("verify", help="re-check every inequality from a manifest")
    p.add_argument("manifest")
    p.add_argument("--deep", action="store_true", help="re-derive every representability witness")
    p.add_argument("--quiet", action="store_true", help="print failures and the verdict only")
    _budget_flags(p)

    p = sub.add_parser("spectrum", help="lattice norm values in a window, or a certified gap")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--norm", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--window", nargs=2, type=_scale, metavar=("A", "B"), help="list rho(Z^d) within [A, B]")
    g.add_argument("--gap", type=_scale, metavar="LOWER", help="find the first certified gap at or above LOWER")
    _budget_flags(p)

    p = sub.add_parser("sample", help="print points sampled from the built set")
    _sampling_flags(p)

    p = sub.add_parser("density", help="Monte Carlo density inside the ball of radius R_n")
    _sampling_flags(p)

    p = sub.add_parser("margin", help="sampled pair distances versus every avoided R_j")
    _sampling_flags(p)

    p = sub.add_parser("demo", help="thickened integer lattice under l1 or linf")
    p.add_argument("--norm", choices=("l1", "linf"), default="linf")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--thickening", type=_rational, default=Fraction(1, 8))
    _sampling_flags(p, manifest=False)

    p = sub.add_parser("render", help="SVG picture of one stage (d = 1 or 2)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--stage", type=int, default=None)
    p.add_argument("--out", required=True)
    return ap


def _construct(a) -> int:
    try:
        norm = NormSpec.parse(a.norm, a.dim)
        f = FSpec.parse(a.f)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m = build(a.dim, norm, f, a.stages, Budgets(a.budget_enum, a.budget_factor))
    write_manifest(m, a.out)
    for st in m.stages:
        print(f"stage {st.n}: R={st.R} eps={format_rational(st.eps)} anchor={st.anchor} side={st.side} "
              f"N={st.ball_count}" + (" (shrunk)" if st.shrunk else ""))
    print(f"certified manifest written to {a.out}")
    return EXIT_OK


def _verify(a) -> int:
    m = read_manifest(a.manifest)
    report = certify(m, deep=a.deep, enum_budget=a.budget_enum, factor_budget=a.budget_factor)
    for line in (report.failure_lines() if a.quiet else report.lines()):
        print(line)
    print(f"status: {report.status}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _spectrum(a) -> int:
    norm = NormSpec.parse(a.norm, a.dim)
    if a.gap is not None:
        g = find_gap(norm, a.gap, a.budget_enum, a.budget_factor)
        ok = verify_gap(norm, g, enum_budget=a.budget_enum, factor_budget=a.budget_factor)
        print(f"R={g.R} eps={format_rational(g.eps)} kind={g.kind} below={g.below} above={g.above}")
        for k, w in g.witnesses:
            print(f"  witness {k}: {w}")
        print(f"verified: {ok}")
        return EXIT_OK if ok else EXIT_FAIL
    lo, hi = a.window
    win = spectrum_window(norm, lo, hi, a.budget_enum)
    for v, w in zip(win.values, win.witnesses):
        print(f"{v}\t{w}")
    print(f"# {len(win.values)} values, {win.examined} lattice points examined")
    return EXIT_OK


def _config(a) -> SamplerConfig:
    return SamplerConfig(a.seed, a.samples, a.stage)


def _sample(a) -> int:
    m = read_manifest(a.manifest)
    for p in sample_points(m, _config(a)):
        print(" ".join(format_rational(c) for c in p))
    return EXIT_OK


def _density(a) -> int:
    m = read_manifest(a.manifest)
    e = mc_density(m, a.stage or 1, _config(a))
    print(f"stage {e.n}: estimate {e.estimate:.6g} +/- {e.stderr:.2g} from {e.samples} samples")
    exact = format_rational(e.exact) if e.exact is not None else f"{e.exact_value:.6g}"
    print(f"exact density {exact} ({e.exact_value:.6g}), z = {e.z:.3g}; f(R_n) = {e.f_bound:.6g}")
    ok = e.within and e.above_f
    print("consistent" if ok else "INCONSISTENT")
    return EXIT_OK if ok else EXIT_FAIL


def _margin(a) -> int:
    m = read_manifest(a.manifest)
    r = pair_margin(m, _config(a))
    print(f"{r.pairs} pairs; minimum margin {r.overall:.6g}; cross-block minimum {r.cross:.6g}")
    for n, v in r.intra.items():
        print(f"  stage {n}: intra-block minimum {v:.6g} (predicted >= {format_rational(r.predicted[n])})")
    print("holds" if r.holds() else "VIOLATED")
    return EXIT_OK if r.holds() else EXIT_FAIL


def _demo(a) -> int:
    rep = thickened_lattice_demo(NormSpec.parse(a.norm, a.dim), a.thickening, _config(a))
    print(f"{rep.norm} d={rep.dim} thickening {format_rational(rep.thickening)}: {rep.pairs} pairs")
    print(f"minimum distance to a half-integer {rep.min_half_distance:.6g} (bound {format_rational(rep.bound)})")
    print(f"density per unit cell {format_rational(rep.cell_density)}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _render(a) -> int:
    m = read_manifest(a.manifest)
    write_text_atomic(a.out, render(m, a.stage))
    print(f"wrote {a.out}")
    return EXIT_OK


COMMANDS = {"construct": _construct, "verify": _verify, "spectrum": _spectrum, "sample": _sample,
            "density": _density, "margin": _margin, "demo": _demo, "render": _render}


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        with unlimited_int_digits():
            return COMMANDS[a.command](a)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ManifestError, NonExactNormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, DistAvoidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""
nsgabor - Gabor transforms on nonseparable lattices.
Command-line entry point: transforms, dual windows, lattice inspection and benchmarks.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from colorama import init as colorama_init, Fore, Style

from config import CONFIG_FILE, get_config, get_config_manager
from dgt_core import FirWindow, as_full, relative_error, window_from_spec
from exceptions import DimensionError, FileFormatError, GaborError, IllegalLengthError
from flops import crossover_scan, crossover_summary, flops_for, write_crossover_csv
from lattice import (
    GaborLattice,
    min_length,
    multiwin_decomp,
    nearest_lengths,
    noshear_factor,
    reduce_lambda,
    shearfind,
    upper_form,
)
from nonsep import OlaAlgorithm, ShearAlgorithm, choose_algorithm, create_algorithm, gabdualns, gabdualns_cg, gabtightns, idgtns
from signal_io import read_coefficients, read_signal, write_coefficients, write_signal

# Initialize colorama for Windows color support
colorama_init()

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
    datefmt='%H:%M:%S'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4

VERIFY_TOL = 1e-8


def status(message: str, color: str = Fore.CYAN):
    print(f"{color}{message}{Style.RESET_ALL}", file=sys.stderr)


def load_window(spec: str, lat: GaborLattice):
    """Gauss spec ('gauss[:tfr[:Lg]]') or a signal file; shorter files become centered FIR windows."""
    if spec.startswith("gauss"):
        return window_from_spec(spec, lat)
    values = read_signal(spec)
    if values.shape[0] == lat.L:
        return values
    if values.shape[0] > lat.L:
        raise DimensionError(f"window file {spec} has {values.shape[0]} samples, L={lat.L}")
    return FirWindow(values, -(values.shape[0] // 2))


def _lattice(args, L: int) -> GaborLattice:
    return GaborLattice.from_params(L, args.a, args.M, args.lp, args.lq)


# --- commands -----------------------------------------------------------------------

def dgt_plan(lat: GaborLattice, algo, g) -> str:
    """Shear parameters of the lattice plus the algorithm's own plan, as 'key=value' pairs."""
    sh = shearfind(lat.L, lat.a, lat.M, lat.lambda1, lat.lambda2)
    plan = {"s0": sh.s0, "s1": sh.s1}
    plan.update((k, v) for k, v in algo.describe().items() if k != "algorithm")
    if isinstance(algo, OlaAlgorithm):
        plan["block_length"] = algo.config_for(g).block_length
    return ", ".join(f"{k}={v}" for k, v in plan.items())


def cmd_dgt(args) -> int:
    f = read_signal(args.inp)
    lat = _lattice(args, f.shape[0])
    g = load_window(args.window, lat)
    name = choose_algorithm(lat, g) if args.algorithm == "auto" else args.algorithm
    kwargs = {"block_length": args.block_length} if name == "ola" else {}
    algo = create_algorithm(name, lat, g, **kwargs)
    c = algo.forward(f, g)
    write_coefficients(args.out, c, args.format)

    status(f"{lat}: algorithm {name} ({dgt_plan(lat, algo, g)})")
    Lg = len(g) if isinstance(g, FirWindow) else None
    Lb = algo.config_for(g).block_length if name == "ola" else None
    status(f"model flops: {flops_for(lat, name, Lg, Lb):.6g}")
    return EXIT_OK


def cmd_idgt(args) -> int:
    c = read_coefficients(args.inp)
    if c.shape[0] != args.M:
        raise DimensionError(f"coefficient file has {c.shape[0]} channels, expected M={args.M}")
    lat = _lattice(args, c.shape[1] * args.a)
    g = as_full(load_window(args.window, lat), lat.L)
    gd = gabdualns(g, lat) if args.synthesis == "dual" else g
    f = idgtns(c, gd, lat)
    write_signal(args.out, f, args.format)
    status(f"{lat}: synthesized {lat.L} samples with the {args.synthesis} window")
    if args.reference:
        err = relative_error(f, read_signal(args.reference))
        color = Fore.GREEN if err < VERIFY_TOL else Fore.YELLOW
        status(f"reconstruction error: {err:.3e}", color)
    return EXIT_OK


def _window_for_dual(args) -> tuple:
    if args.window.startswith("gauss"):
        if args.L is None:
            raise DimensionError("--L is required for a gauss window")
        lat = _lattice(args, args.L)
    else:
        values = read_signal(args.window)
        lat = _lattice(args, args.L or values.shape[0])
    return lat, as_full(load_window(args.window, lat), lat.L)


def _verify(lat: GaborLattice, g: np.ndarray, w: np.ndarray, tight: bool, seed: int) -> float:
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(lat.L) + 1j * rng.standard_normal(lat.L)
    algo = ShearAlgorithm(lat)
    if tight:
        c = algo.forward(f, w)
        return abs(np.vdot(c, c).real / np.vdot(f, f).real - 1.0)
    return relative_error(algo.adjoint(algo.forward(f, g), w), f)


def _cmd_window(args, tight: bool) -> int:
    lat, g = _window_for_dual(args)
    if tight:
        w = gabtightns(g, lat)
    elif args.method == "cg":
        w = gabdualns_cg(g, lat)
    else:
        w = gabdualns(g, lat)
    write_signal(args.out, w, args.format)
    kind = "tight" if tight else "dual"
    status(f"{lat}: wrote canonical {kind} window to {args.out}")
    if args.verify:
        err = _verify(lat, g, w, tight, args.seed)
        if err > VERIFY_TOL:
            status(f"verification failed: error {err:.3e}", Fore.RED)
            return EXIT_NUMERIC
        status(f"verification passed: error {err:.3e}", Fore.GREEN)
    return EXIT_OK


def cmd_gabdual(args) -> int:
    return _cmd_window(args, tight=False)


def cmd_gabtight(args) -> int:
    return _cmd_window(args, tight=True)


def lattice_report(a: int, M: int, lp: int, lq: int, L: Optional[int] = None) -> dict:
    lp, lq = reduce_lambda(lp, lq)
    l_min = min_length(a, M, lp, lq)
    c1, factor = noshear_factor(a, M, lp, lq)
    report = {
        "a": a, "M": M, "lambda1": lp, "lambda2": lq,
        "L_min": l_min,
        "noshear_c1": c1,
        "noshear_factor": factor,
        "noshear_stride": l_min * factor,
        "separable": lp == 0,
    }
    if L is not None and L % l_min:
        lower, upper = nearest_lengths(L, a, M, lp, lq)
        report.update(L=L, feasible=False, nearest_lower=lower, nearest_upper=upper)
        return report
    L = l_min if L is None else L
    lat = GaborLattice.from_params(L, a, M, lp, lq)
    sh = shearfind(L, a, M, lp, lq)
    mw = multiwin_decomp(lat)
    report.update(
        L=L,
        feasible=True,
        normal_form={"a": lat.a, "b": lat.b, "s": lat.s},
        upper_form=[list(row) for row in upper_form(lat).rows],
        constants=dict(zip("cdpq", (lat.c, lat.d, lat.p, lat.q))),
        redundancy=str(lat.redundancy),
        shear={"s0": sh.s0, "s1": sh.s1, "a_r": sh.a_r, "b_r": sh.b_r,
               "freq_shear": sh.freq_shear_needed, "time_shear": sh.time_shear_needed},
        multiwindow={"windows": mw.lambda2, "base_a": mw.base_a, "base_b": mw.base_b},
    )
    return report


def cmd_latinfo(args) -> int:
    report = lattice_report(args.a, args.M, args.lp, args.lq, args.L)
    if args.json:
        print(json.dumps(report, indent=2))
        return EXIT_OK

    print(f"lattice a={report['a']} M={report['M']} lambda={report['lambda1']}/{report['lambda2']}")
    print(f"  L_min = {report['L_min']}")
    if report["separable"]:
        print("  separable; no shear required")
    else:
        print(f"  no frequency shear for L = n*{report['noshear_stride']} "
              f"(c1={report['noshear_c1']}, factor {report['noshear_factor']})")
    if not report["feasible"]:
        status(f"L={report['L']} is not a legal length; nearest: "
               f"{report['nearest_lower']} / {report['nearest_upper']}", Fore.YELLOW)
        return EXIT_OK
    nf, sh, mw = report["normal_form"], report["shear"], report["multiwindow"]
    print(f"  L = {report['L']}, redundancy {report['redundancy']}")
    print(f"  normal form: a={nf['a']} b={nf['b']} s={nf['s']}")
    print(f"  upper form: {report['upper_form']}")
    print("  constants: " + " ".join(f"{k}={v}" for k, v in report["constants"].items()))
    print(f"  shear: s0={sh['s0']} s1={sh['s1']} a_r={sh['a_r']} b_r={sh['b_r']}")
    print(f"  multiwindow: {mw['windows']} windows on ({mw['base_a']}, {mw['base_b']})")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = get_config().bench
    if args.preset == "fig2":
        pairs = [tuple(p) for p in cfg.preset_pairs]
    elif args.a is not None and args.M is not None:
        pairs = [(args.a, args.M)]
    else:
        raise ValueError("bench needs --a and --M or --preset fig2")
    algorithms = [name.strip() for name in args.algorithms.split(",") if name.strip()]

    rows = []
    for a, M in pairs:
        status(f"benchmark a={a} M={M}, lambda2 = 1..{args.lq_max}")
        rows += crossover_scan(
            a, M, range(1, args.lq_max + 1),
            l_factor=args.L_factor, repeats=args.repeats, seed=args.seed,
            algorithms=algorithms, measure=not args.model_only,
        )

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_crossover_csv(rows, fh)
    else:
        write_crossover_csv(rows, sys.stdout)
    for s in crossover_summary(rows):
        rank = "n/a" if s.time_spearman is None else f"{s.time_spearman:.3f}"
        status(f"a={s.a} M={s.M} {s.algorithm}: model slope {s.model_slope:.4g}, "
               f"max/min {s.model_ratio:.3f}, time rank correlation {rank}")
    return EXIT_OK


def cmd_randsig(args) -> int:
    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal(args.L) + 1j * rng.standard_normal(args.L)
    write_signal(args.out, f, args.format)
    status(f"wrote {args.L} random samples to {args.out}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------

def _add_lattice_args(p: argparse.ArgumentParser):
    p.add_argument('--a', type=int, required=True, help='Time shift')
    p.add_argument('--M', type=int, required=True, help='Number of channels')
    p.add_argument('--lp', type=int, default=0, help='Shear numerator lambda1 (default: 0)')
    p.add_argument('--lq', type=int, default=1, help='Shear denominator lambda2 (default: 1)')


def _add_format_arg(p: argparse.ArgumentParser):
    p.add_argument('--format', choices=['auto', 'csv', 'binary'], default='auto',
                   help='Output format (default: by file suffix)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsgabor", description="Gabor transforms on nonseparable lattices")
    parser.add_argument('--config', type=Path, help='Configuration file (JSON)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('dgt', help='Forward transform of a signal file')
    p.add_argument('--in', dest='inp', required=True, help='Input signal file')
    p.add_argument('--out', required=True, help='Output coefficient file')
    _add_lattice_args(p)
    p.add_argument('--algorithm', choices=['auto', 'separable', 'shear', 'multiwin', 'snf', 'naive', 'ola'],
                   default='auto', help='Algorithm (default: auto)')
    p.add_argument('--window', default='gauss', help="'gauss[:tfr[:Lg]]' or a window file")
    p.add_argument('--block-length', type=int, help='Block length for the ola algorithm')
    _add_format_arg(p)
    p.set_defaults(func=cmd_dgt)

    p = sub.add_parser('idgt', help='Inverse transform of a coefficient file')
    p.add_argument('--in', dest='inp', required=True, help='Input coefficient file')
    p.add_argument('--out', required=True, help='Output signal file')
    _add_lattice_args(p)
    p.add_argument('--window', default='gauss', help="'gauss[:tfr[:Lg]]' or a window file")
    p.add_argument('--synthesis', choices=['dual', 'window'], default='dual',
                   help='Synthesize with the canonical dual of the window, or the window itself')
    p.add_argument('--reference', help='Signal file to compare the reconstruction against')
    _add_format_arg(p)
    p.set_defaults(func=cmd_idgt)

    for name, func in (('gabdual', cmd_gabdual), ('gabtight', cmd_gabtight)):
        p = sub.add_parser(name, help=f'Canonical {name[3:]} window')
        _add_lattice_args(p)
        p.add_argument('--window', default='gauss', help="'gauss[:tfr[:Lg]]' or a window file")
        p.add_argument('--L', type=int, help='Transform length (required for gauss windows)')
        p.add_argument('--out', required=True, help='Output window file')
        p.add_argument('--verify', action='store_true', help='Check reconstruction or tightness')
        p.add_argument('--seed', type=int, default=0, help='Seed of the verification signal')
        if name == 'gabdual':
            p.add_argument('--method', choices=['shear', 'cg'], default='shear', help='Dual solver')
        _add_format_arg(p)
        p.set_defaults(func=func)

    p = sub.add_parser('latinfo', help='Lattice structure report')
    _add_lattice_args(p)
    p.add_argument('--L', type=int, help='Transform length')
    p.add_argument('--json', action='store_true', help='Machine-readable output')
    p.set_defaults(func=cmd_latinfo)

    p = sub.add_parser('bench', help='Flop model and timings over lambda2')
    p.add_argument('--a', type=int, help='Time shift')
    p.add_argument('--M', type=int, help='Number of channels')
    p.add_argument('--preset', choices=['fig2'], help='Run the three standard (a, M) pairs')
    p.add_argument('--lq-max', type=int, default=10, help='Largest lambda2 (default: 10)')
    p.add_argument('--L-factor', type=int, help='L = lcm(a, M) * factor (default from config)')
    p.add_argument('--repeats', type=int, help='Timing repeats (default from config)')
    p.add_argument('--algorithms', default='multiwin,shear,snf', help='Comma separated algorithm names')
    p.add_argument('--model-only', action='store_true', help='Skip timings')
    p.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
    p.add_argument('--out', help='CSV output file (default: stdout)')
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser('randsig', help='Seeded complex Gaussian test signal')
    p.add_argument('--L', type=int, required=True, help='Signal length')
    p.add_argument('--out', required=True, help='Output signal file')
    p.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
    _add_format_arg(p)
    p.set_defaults(func=cmd_randsig)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    manager = get_config_manager()
    manager.load(args.config or CONFIG_FILE)

    try:
        return args.func(args)
    except IllegalLengthError as e:
        status(f"error: {e}", Fore.RED)
        return EXIT_INFEASIBLE
    except (FileFormatError, DimensionError, OSError) as e:
        status(f"error: {e}", Fore.RED)
        return EXIT_USAGE
    except GaborError as e:
        status(f"error: {e}", Fore.RED)
        return EXIT_NUMERIC
    except ValueError as e:
        status(f"error: {e}", Fore.RED)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

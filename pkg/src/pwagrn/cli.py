"""Command-line front end.

Every subcommand prints a one-line summary on standard output and, when
``-o`` is given, writes its artifact atomically.  Exit status: 0 success,
1 bad parameters or input, 2 parameters outside an analytic formula's
domain, 3 no cycle found.
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import explorer, negcircuit, rotation
from .errors import AnalyticDomainError, PwagrnError, UndecidedError
from .io import atomic_write, fmt, parse_network, pgm_text, write_csv, write_raster
from .network import (
    Heaviside,
    fixed_point_of_code,
    iterate,
    negative_2circuit,
    positive_2circuit,
    self_activator,
    self_inhibitor,
    symbols_of,
)
from .symbolic import code_of_trajectory, is_admissible, parse_code, periodic_orbit_from_code, str_to_word, transition_graph, word_to_str

EXIT_OK, EXIT_PARAM, EXIT_DOMAIN, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers ------------------------------------------------------------------


def _floats(text: str, n: int | None = None, what: str = "value") -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}")
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _ints(text: str, n: int, what: str) -> list:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}")
    if len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated integers")
    return vals


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational {text!r} (expected p/q)")


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def _network(args):
    if args.network:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return parse_network(args.network, allow_normalize=args.normalize)
    if not args.circuit:
        raise UsageError("give --network FILE or --circuit {selfact,selfinh,pos2,neg2}")
    _require(args, "a")
    if args.thresholds:
        ts = _floats(args.thresholds, what="--thresholds")
    else:
        ts = [t for t in (args.t1, args.t2) if t is not None]
    need = 1 if args.circuit in ("selfact", "selfinh") else 2
    if len(ts) != need:
        raise UsageError(f"circuit {args.circuit} needs {need} threshold(s)")
    make = {
        "selfact": lambda: self_activator(ts[0], args.a),
        "selfinh": lambda: self_inhibitor(ts[0], args.a),
        "pos2": lambda: positive_2circuit(ts[0], ts[1], args.a),
        "neg2": lambda: negative_2circuit(ts[0], ts[1], args.a),
    }
    return make[args.circuit]()


def _conv(args) -> Heaviside:
    return Heaviside.parse(args.convention)


def _x0(args, net):
    if args.x0 is None:
        return np.full(net.n_genes, 0.1)
    return np.array(_floats(args.x0, net.n_genes, "--x0"))


def _nu_from_args(args, family=None) -> Fraction:
    if args.nu is not None:
        return _fraction(args.nu)
    if args.rho is not None and family is not None:
        return negcircuit.rho_nu_convert(*family, _fraction(args.rho), "rho_to_nu")
    raise UsageError("give --nu p/q (or --rho)")


def _emit(args, header, rows):
    if args.output:
        write_csv(args.output, header, rows)


# -- subcommands -------------------------------------------------------------------------


def cmd_simulate(args):
    net = _network(args)
    traj = iterate(net, _x0(args, net), args.steps, _conv(args))
    rows = [
        [t] + [float(v) for v in x] + [word_to_str(symbols_of(net, x, _conv(args)))]
        for t, x in enumerate(traj)
    ]
    _emit(args, ["t"] + [f"x{i + 1}" for i in range(net.n_genes)] + ["word"], rows)
    last = ", ".join(fmt(float(v)) for v in traj[-1])
    print(f"simulated {args.steps} steps, final state ({last})")


def cmd_code(args):
    net = _network(args)
    code = code_of_trajectory(net, _x0(args, net), args.max_steps, args.max_steps, _conv(args))
    if args.output:
        atomic_write(args.output, code.text() + "\n")
    print(f"{code.text()} (period {code.period_length}, transient {len(code.transient)})")


def cmd_admit(args):
    net = _network(args)
    _require(args, "code")
    code = parse_code(args.code, net.n_edges)
    verdict = is_admissible(net, code, _conv(args))
    if args.output:
        rows = [[t] + [float(v) for v in x] + [word_to_str(w)] for t, (x, w) in enumerate(zip(verdict.orbit, code.period))]
        write_csv(args.output, ["t"] + [f"x{i + 1}" for i in range(net.n_genes)] + ["word"], rows)
    print(verdict.summary())


def cmd_fixedpoint(args):
    net = _network(args)
    _require(args, "symbols")
    word = str_to_word(args.symbols, net.n_edges)
    x, ok = fixed_point_of_code(net, word)
    pt = ", ".join(fmt(float(v)) for v in x)
    print(f"fixed point ({pt}) {'admissible' if ok else 'not admissible'}")


def cmd_graph(args):
    net = _network(args)
    g = transition_graph(net, _conv(args), bounded=args.bounded)
    rows = sorted((word_to_str(s), word_to_str(d)) for s, d in g.edges)
    _emit(args, ["source", "target"], rows)
    print(f"{len(g.nodes)} atoms, {len(rows)} transitions: " + " ".join(f"{s}->{d}" for s, d in rows))


def _rot_row(t, r):
    lo = r.lower
    return (t, lo.numerator, lo.denominator, r.label())


def cmd_rot(args):
    _require(args, "a", "t1")
    r = rotation.rotation_number(args.a, args.t1, args.qmax, args.eps)
    if r.is_rational:
        lo, hi = r.plateau
        extra = " (ghost boundary)" if r.boundary else ""
        print(f"nu = {r.nu} on plateau [{fmt(lo)}, {fmt(hi)}]{extra}")
    else:
        lo, hi = r.bracket
        print(f"nu in ({lo}, {hi}) (no plateau with denominator <= {args.qmax})")


def cmd_staircase(args):
    _require(args, "a")
    st = rotation.staircase(args.a, args.tlo, args.thi, args.samples, args.qmax, args.eps)
    _emit(args, ["T", "nu_num", "nu_den", "kind"], [_rot_row(t, r) for t, r in st])
    n_rat = sum(r.is_rational for _, r in st)
    print(f"staircase a={fmt(args.a)}: {len(st)} samples, {n_rat} on rational plateaus")


def cmd_plateau(args):
    _require(args, "a")
    nu = _nu_from_args(args)
    lo, hi = rotation.plateau_interval(args.a, nu)
    print(f"plateau of nu={nu} at a={fmt(args.a)}: [{fmt(lo)}, {fmt(hi)}]")


def cmd_balanced(args):
    _require(args, "p")
    ap = negcircuit.balanced_critical(args.p)
    if args.a is None:
        print(f"a_{args.p} = {ap:.12f}")
        return
    rect = negcircuit.balanced_domain(args.a, args.p)
    if rect is None:
        print(f"a_{args.p} = {ap:.12f}; balanced orbit p={args.p} does not exist at a={fmt(args.a)}")
    else:
        print(
            f"a_{args.p} = {ap:.12f}; balanced square ({fmt(rect.i1.lo)}, {fmt(rect.i1.hi)})^2 at a={fmt(args.a)}"
        )


def _rect_row(rect, family, nu):
    rho = 1 / nu - sum(family)
    return (
        *family, nu.numerator, nu.denominator, rho,
        rect.i1.lo, rect.i1.hi, rect.i2.lo, rect.i2.hi,
        int(rect.i1.lo_strict), int(rect.i1.hi_strict), int(rect.i2.lo_strict), int(rect.i2.hi_strict),
    )


RECT_HEADER = [
    "n_A", "n_B", "n_C", "nu_num", "nu_den", "rho", "I1_lo", "I1_hi", "I2_lo", "I2_hi",
    "I1_lo_strict", "I1_hi_strict", "I2_lo_strict", "I2_hi_strict",
]


def _family(args):
    _require(args, "na", "nb", "nc")
    return (args.na, args.nb, args.nc)


def cmd_rect(args):
    _require(args, "a")
    fam = _family(args)
    nu = _nu_from_args(args, fam)
    rect = negcircuit.admissibility_rect(args.a, *fam, nu)
    if rect is None:
        _emit(args, RECT_HEADER, [])
        print(f"empty: no thresholds admit n={fam} nu={nu} at a={fmt(args.a)}")
        return
    _emit(args, RECT_HEADER, [_rect_row(rect, fam, nu)])
    print(
        f"I1 = {_iv(rect.i1)}, I2 = {_iv(rect.i2)} for n={fam} nu={nu} rho={1 / nu - sum(fam)}"
    )


def _iv(iv):
    return f"{'(' if iv.lo_strict else '['}{fmt(iv.lo)}, {fmt(iv.hi)}{')' if iv.hi_strict else ']'}"


def cmd_conditions(args):
    _require(args, "a", "nu2")
    fam = _family(args)
    nu1 = _fraction(args.nu1) if args.nu1 else Fraction(0)
    cs = negcircuit.family_conditions(args.a, *fam, nu1, _fraction(args.nu2))
    flags = " ".join(f"C{i + 1}={'yes' if c else 'no'}" for i, c in enumerate(cs))
    print(f"{flags} -> {'family exists' if all(cs) else 'family fails'}")


def _families(args):
    if args.families:
        try:
            return [tuple(int(v) for v in f.split(",")) for f in args.families.split(";")]
        except ValueError:
            raise UsageError("--families expects 'nA,nB,nC;nA,nB,nC;...'")
    return [(1, 1, p) for p in range(1, args.pmax + 1)]


def cmd_domains(args):
    _require(args, "a")
    region = _floats(args.region, 4, "--region") if args.region else [0.0, 1.0, 0.0, 1.0]
    res = _ints(args.res, 2, "--res") if args.res else [256, 256]
    grid = explorer.domain_raster(
        args.a, region, res, _families(args), args.qmax, not args.no_images, args.workers
    )
    if args.output:
        write_raster(grid, args.output)
    covered = int((grid.labels > 0).sum())
    msg = f"{len(grid.legend)} domains, {covered}/{grid.labels.size} cells covered"
    if args.simulate:
        msg += _cross_check(args, grid)
    print(msg)


def _cross_check(args, grid) -> str:
    rng = np.random.default_rng(args.seed)
    xs, ys = grid.centers()
    labelled = np.flatnonzero(grid.labels.ravel() > 0)
    k = max(1, len(labelled) // 100) if len(labelled) else 0
    picks = rng.choice(labelled, size=k, replace=False) if k else []
    agree = 0
    for idx in picks:
        j, i = divmod(int(idx), len(xs))
        net = negative_2circuit(float(xs[i]), float(ys[j]), args.a)
        entry = grid.entry(int(grid.labels[j, i]))
        # the regular orbit may coexist with other attractors: try a few starts
        orbit0 = periodic_orbit_from_code(net, parse_code(entry.code).period)[0]
        margin = is_admissible(net, entry.code).margin
        kick = rng.uniform(-0.5, 0.5, 2) * margin
        found = set()
        for x0 in (orbit0 + kick, [0.5, 0.5], [0.1, 0.9]):
            try:
                found.add(explorer.detect_cycle(net, x0, args.max_steps).code.period)
            except UndecidedError:
                continue
        agree += parse_code(entry.code).period in found
    return f"; simulation agrees on {agree}/{len(picks)} sampled cells"


def cmd_basins(args):
    net = _network(args)
    region = _floats(args.region, 4, "--region") if args.region else [0.0, 1.0, 0.0, 1.0]
    res = _ints(args.res, 2, "--res") if args.res else [256, 256]
    grid = explorer.basin_raster(net, region, res, args.max_steps, _conv(args), args.workers)
    if args.output:
        write_raster(grid, args.output)
    undecided = int((grid.labels == 0).sum())
    periods = sorted(e.period for e in grid.legend)
    print(f"{len(grid.legend)} attractors (periods {periods}), {undecided} undecided cells")


def cmd_posdiag(args):
    _require(args, "a")
    doms = explorer.positive2_diagonal_domains(args.a, args.qmax)
    _emit(args, ["nu_num", "nu_den", "T_lo", "T_hi"], [(nu.numerator, nu.denominator, lo, hi) for nu, (lo, hi) in doms])
    print(f"{len(doms)} diagonal squares for q <= {args.qmax} at a={fmt(args.a)}")


def cmd_sweep(args):
    region = _floats(args.region, 4, "--region") if args.region else [0.05, 0.95, 0.02, 0.98]
    res = _ints(args.res, 2, "--res") if args.res else [64, 64]
    a_vals, t_vals = explorer.cell_centers(region, res)
    rows, shade = [], np.zeros((len(t_vals), len(a_vals)), dtype=int)
    for j, t in enumerate(t_vals):
        for i, a in enumerate(a_vals):
            r = rotation.rotation_number(float(a), float(t), args.qmax, args.eps)
            rows.append((float(a), float(t), r.lower.numerator, r.lower.denominator, r.label()))
            shade[j, i] = int(round(255 * r.value))
    if args.output:
        atomic_write(args.output, pgm_text(shade))
        write_csv(os.path.splitext(args.output)[0] + ".csv", ["a", "T", "nu_num", "nu_den", "kind"], rows)
    print(f"rotation numbers on a {res[0]}x{res[1]} (a, T) grid")


COMMANDS = {
    "simulate": (cmd_simulate, "iterate the map and record the trajectory"),
    "code": (cmd_code, "symbolic code of a trajectory"),
    "admit": (cmd_admit, "admissibility of a periodic code"),
    "fixedpoint": (cmd_fixedpoint, "fixed point of a constant code"),
    "graph": (cmd_graph, "transition graph between atoms"),
    "rot": (cmd_rot, "rotation number of the self-inhibitor"),
    "staircase": (cmd_staircase, "sampled Devil's staircase T -> nu"),
    "plateau": (cmd_plateau, "threshold plateau of a rational rotation number"),
    "balanced": (cmd_balanced, "critical rate a_p and balanced-orbit square"),
    "rect": (cmd_rect, "existence rectangle of a regular code"),
    "conditions": (cmd_conditions, "existence conditions C1..C5 of a family"),
    "domains": (cmd_domains, "threshold-plane raster of regular-orbit domains"),
    "basins": (cmd_basins, "phase-space raster of basins of attraction"),
    "posdiag": (cmd_posdiag, "diagonal-orbit squares of the positive 2-circuit"),
    "sweep": (cmd_sweep, "rotation-number raster over (a, T)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--network", help="network spec file (JSON)")
    common.add_argument("--circuit", choices=["selfact", "selfinh", "pos2", "neg2"])
    common.add_argument("--normalize", action="store_true", help="rescale weights to unit row sums")
    common.add_argument("--a", type=float, help="degradation rate")
    common.add_argument("--t1", type=float)
    common.add_argument("--t2", type=float)
    common.add_argument("--thresholds", help="comma-separated thresholds")
    common.add_argument("--x0", help="comma-separated initial state")
    common.add_argument("--steps", type=int, default=100)
    common.add_argument("--max-steps", type=int, default=explorer.DEFAULT_MAX_STEPS)
    common.add_argument("--code", help='periodic code, e.g. "per: 10 00 01 11"')
    common.add_argument("--symbols", help="constant symbol word, e.g. 01")
    common.add_argument("--bounded", action="store_true", help="restrict atoms to the unit cube")
    common.add_argument("--nu", help="rotation number p/q")
    common.add_argument("--nu1", help="lower end of a rotation-number interval")
    common.add_argument("--nu2", help="upper end of a rotation-number interval")
    common.add_argument("--rho", help="mean steps per winding in the fourth atom")
    common.add_argument("--na", type=int)
    common.add_argument("--nb", type=int)
    common.add_argument("--nc", type=int)
    common.add_argument("--p", type=int)
    common.add_argument("--pmax", type=int, default=7, help="families (1,1,p) for p <= pmax")
    common.add_argument("--families", help="'nA,nB,nC;...'")
    common.add_argument("--no-images", action="store_true", help="skip symmetry images of families")
    common.add_argument("--simulate", action="store_true", help="cross-check 1%% of cells by simulation")
    common.add_argument("--region", help="x0,x1,y0,y1")
    common.add_argument("--res", help="nx,ny")
    common.add_argument("--samples", type=int, default=400)
    common.add_argument("--tlo", type=float, default=0.001)
    common.add_argument("--thi", type=float, default=0.999)
    common.add_argument("--qmax", type=int, default=rotation.DEFAULT_QMAX)
    common.add_argument("--eps", type=float, default=rotation.DEFAULT_EPS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--convention", choices=["standard", "ghost"], default="standard")
    common.add_argument("-o", "--output", help="artifact path")

    parser = _Parser(prog="pwagrn", description="Piecewise-affine gene network analyses")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        if args.workers is None:
            env = os.environ.get("PWAGRN_WORKERS")
            args.workers = int(env) if env else 1
        COMMANDS[args.command][0](args)
    except UndecidedError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except AnalyticDomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, PwagrnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

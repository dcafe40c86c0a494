"""Command line front end.

    polyostat constants FAMILY [--format json|csv]
    polyostat enumerate FAMILY --n-max N [--perimeter N] [--full]
    polyostat simulate FAMILY --m M --seed S [--trials T]
    polyostat llt FAMILY --n N
    polyostat gf-check FAMILY
    polyostat chain-check FAMILY [--dump]

Numbers are rendered with 12 significant digits. Exit status: 0 on success,
2 on usage errors, 1 on computational failures. The working precision
follows POLYOSTAT_PRECISION ("extended", the default, or "double").
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from ._numeric import PolyostatError, working_dtype
from .families import FAMILIES, as_family, family_spec

TOL_GF = 1e-5


def _num(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    return float(f"{float(x):.12g}")


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        body = rows[0] if len(rows) == 1 else rows
        out.write(json.dumps(body, indent=2) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow(["" if v is None else v for v in r.values()])


def _model(f, args):
    from .qseries import KernelModel, default_model
    m = default_model(f)
    if args.j_max is None:
        return m
    return KernelModel(f, args.j_max, m.L_max)


def constants_record(family, model=None, K_max: int = 80) -> dict:
    """Every constant reported by ``constants``, unrounded, in a fixed key order."""
    from .moments import joint_stats
    from .spectral import bender_width_constants
    f = as_family(family)
    sc = bender_width_constants(f, model, K_max)
    ps = joint_stats(f, model, K_max)
    row = {"family": f.value, "precision": str(working_dtype().__name__)}
    for k in ("rho", "mu1", "sigma1_sq", "mu2", "sigma2_sq", "C1", "C2", "C1_total", "C2_total"):
        row[k] = getattr(sc, k)
    for k in ("mu3", "sigma3_sq", "sigmaQ_sq", "C_XQ", "rho_XQ", "alpha", "beta", "gamma",
              "mu4", "sigma4_sq", "mu4_star", "sigma4_star_sq", "sigma_x_sq", "sigma_X_sq"):
        row[k] = getattr(ps, k)
    row["horizontal_increment"] = family_spec(f).horizontal_increment
    row["gf_supported"] = family_spec(f).supports_known_gf
    row["route"] = ps.route
    return row


def cmd_constants(args, out):
    f = as_family(args.family)
    row = constants_record(f, _model(f, args), args.k_max)
    _emit([{k: v if isinstance(v, (str, bool, int)) else _num(v) for k, v in row.items()}],
          args.format, out)


def cmd_enumerate(args, out):
    from . import enumerate as en
    f = as_family(args.family)
    if args.perimeter is not None:
        h = en.exact_perimeter_histogram(f, args.perimeter)
        if args.format == "csv":
            en.write_histogram_csv(h, out)
        else:
            _emit([{"family": f.value, "n": h.n,
                    "counts": {str(p): c for p, c in h.counts.items()}}], "json", out)
        return
    t = en.count_table(f, args.n_max)
    if args.format == "csv":
        (en.write_counts_csv if args.full else en.write_totals_csv)(t, out)
        return
    row = {"family": f.value, "n_max": t.n_max, "totals": t.totals()}
    if t.n_max >= 20:
        row["growth_estimate"] = _num(en.growth_estimate(t))
    _emit([row], "json", out)


def cmd_simulate(args, out):
    from . import simulate as sim
    f = as_family(args.family)
    if args.trials is None:
        if args.format == "json":
            t = sim.attach_perimeter(sim.sample_chain(f, args.m, args.seed))
            _emit([{"family": f.value, "m": args.m, "seed": args.seed,
                    "generator": sim.GENERATOR, "X": int(t.X[-1]), "Q": int(t.Q[-1])}],
                  "json", out)
        else:
            sim.write_trajectory_csv(f, args.m, args.seed, out)
        return
    r = sim.gaussian_check(f, args.m, args.trials, args.seed)
    row = {k: _num(v) if isinstance(v, float) else v for k, v in r.as_dict().items()}
    _emit([row], args.format, out)


def cmd_llt(args, out):
    from . import enumerate as en
    f = as_family(args.family)
    t = en.count_table(f, max(args.n, args.n_max or 0))
    _emit([{"family": f.value, "n": args.n,
            "residual": _num(en.llt_residual(f, args.n, t))}], args.format, out)


def cmd_gf_check(args, out):
    from .moments import joint_stats
    from .spectral import gf_perimeter_constants
    f = as_family(args.family)
    ps = joint_stats(f)
    row = {"family": f.value, "gf_supported": family_spec(f).supports_known_gf,
           "mu4_moments": _num(ps.mu4), "sigma4_sq_moments": _num(ps.sigma4_sq),
           "mu4_gf": None, "sigma4_sq_gf": None, "mu4_diff": None,
           "sigma4_sq_diff": None, "tolerance": TOL_GF, "agree": None}
    if row["gf_supported"]:
        mu, var = gf_perimeter_constants(f)
        dm, dv = abs(float(mu - ps.mu4)), abs(float(var - ps.sigma4_sq))
        row.update(mu4_gf=_num(mu), sigma4_sq_gf=_num(var), mu4_diff=_num(dm),
                   sigma4_sq_diff=_num(dv), agree=bool(dm < TOL_GF and dv < TOL_GF))
    _emit([row], args.format, out)


def cmd_chain_check(args, out):
    from .markov import build_chain, chain_checks
    f = as_family(args.family)
    c = build_chain(f, _model(f, args), args.k_max)
    if args.dump:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k", "j", "Pi"])
        for k in range(c.K_max):
            for j in range(c.K_max):
                if c.Pi[k, j]:
                    w.writerow([k + 1, j + 1, f"{float(c.Pi[k, j]):.12g}"])
        return
    r = chain_checks(f, c)
    row = {"family": f.value}
    for k in ("row_sum_residual", "stationarity_residual", "reversibility_residual",
              "mixing_tv", "kernel_weight_residual"):
        row[k] = _num(getattr(r, k))
    _emit([row], args.format, out)


def _positive(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(s):
    v = int(s)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyostat", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    names = [f.value for f in FAMILIES]

    def add(name, fn, default_fmt="json", helptext=""):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("family", choices=names)
        s.add_argument("--format", choices=("json", "csv"), default=default_fmt)
        s.add_argument("--out", help="write to this path instead of stdout")
        s.add_argument("--K-max", dest="k_max", type=_positive, default=80)
        s.add_argument("--J-max", dest="j_max", type=_positive, default=None)
        s.set_defaults(func=fn)
        return s

    add("constants", cmd_constants, helptext="all asymptotic constants of a family")
    s = add("enumerate", cmd_enumerate, "csv", "exact counts by area")
    s.add_argument("--n-max", type=_positive, default=20)
    s.add_argument("--full", action="store_true", help="rows (n, m, j, count)")
    s.add_argument("--perimeter", type=_positive, metavar="N",
                   help="perimeter histogram at area N instead of counts")
    s = add("simulate", cmd_simulate, "csv", "trajectory CSV or Gaussian check report")
    s.add_argument("--m", type=_positive, default=400)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--trials", type=_positive, default=None)
    s = add("llt", cmd_llt, helptext="local limit theorem residual")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--n-max", type=_positive, default=None)
    add("gf-check", cmd_gf_check, helptext="moments route vs known perimeter GF")
    s = add("chain-check", cmd_chain_check, helptext="structural residuals of the chain")
    s.add_argument("--dump", action="store_true", help="CSV rows (k, j, Pi) instead")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        args.func(args, out)
    except PolyostatError as e:
        print(f"polyostat: error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"polyostat: usage error: {e}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    finally:
        if args.out:
            out.close()
    return 0

if __name__ == "__main__":
    sys.exit(main())

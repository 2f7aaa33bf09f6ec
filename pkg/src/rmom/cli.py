"""Command-line front end.

    rmom analyze --state cross_hatch
    rmom region --d 3 --grid 0:1:101 [--ppt --restarts 10]
    rmom mc --state isotropic --p 0.9 --d 3 --samples 200000 --seed 1
    rmom sector --state ghz | --g 0.5 --w 0.3 | --scan-gw
    rmom conjecture --max-terms 8 --restarts 50 --seed 0
    rmom figure --kind region --d 3 --out figures/

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 biseparability
conjecture violated. Every output embeds the configuration that produced
it (a ``# config:`` line in CSV, a ``config`` key in JSON). Thread counts
and output paths are left out because they do not change results.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import detect, moments, optsearch, polytope, statezoo
from .bloch import sector_lengths
from .errors import NumericalError, UsageError

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 1, 2, 3
NOT_CONFIG = ("out", "workers", "func")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(x):
    """Float rounded to 15 significant digits (JSON) or rendered as text (CSV)."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value {x} in output")
    return float(f"{x:.15g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, int, np.floating, np.integer, np.bool_)):
        return _num(obj)
    return obj


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.15g}"
    return str(x)


def config_of(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in NOT_CONFIG}


def render_json(args, payload):
    return json.dumps({"config": config_of(args), **_clean(payload)}, indent=2) + "\n"


def render_csv(args, columns, rows):
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config_of(args), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(args, text):
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(spec, lo=0.0, hi=1.0):
    try:
        a, b, steps = spec.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise UsageError(f"grid must look like A:B:STEPS, got {spec!r}") from None
    if steps < 1 or a > b or (steps == 1 and a != b) or a < lo or b > hi:
        raise UsageError(f"grid {spec!r} must satisfy {lo} <= A <= B <= {hi} and STEPS >= 1")
    return np.linspace(a, b, steps).tolist() if steps > 1 else [a]


def parse_r(spec):
    try:
        rs = sorted({int(x) for x in spec.split(",")})
    except ValueError:
        raise UsageError(f"--r expects integers like 2,4, got {spec!r}") from None
    if not rs or rs[0] < 1:
        raise UsageError("moment orders must be positive")
    return rs


def load_state(args):
    if args.file and args.state:
        raise UsageError("give either --state or --file, not both")
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                spec = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.file} is not valid JSON: {exc.msg}") from None
        return statezoo.from_spec(spec), os.path.basename(args.file)
    if args.state:
        params = {k: getattr(args, k) for k in ("p", "d", "g", "w") if getattr(args, k) is not None}
        return statezoo.named_state(args.state, params), args.state
    raise UsageError("a state is required (--state NAME or --file PATH)")


# --- commands ---------------------------------------------------------------------


def cmd_analyze(args):
    rho, label = load_state(args)
    if rho.n != 2 or rho.dims[0] != rho.dims[1]:
        raise UsageError("analyze needs a two-qudit state with equal dimensions; use 'sector' for three qubits")
    report = detect.moment_witness(rho, label)
    data = report.to_dict()
    if args.format == "csv":
        rows = [(k, v) for k, v in data.items() if not isinstance(v, dict)]
        rows += [(f"moments.{k}", v) for k, v in data["moments"].items()]
        rows += [(f"verdict.{k}", v) for k, v in data["verdicts"].items()]
        return render_csv(args, ["field", "value"], rows), EXIT_OK
    return render_json(args, {"report": data}), EXIT_OK


def _region(args):
    if args.d not in (3, 4):
        raise UsageError("region curves are provided for d = 3 and d = 4")
    grid = parse_grid(args.grid)
    ppt = None
    if args.ppt:
        ppt = optsearch.ppt_s4_boundary(grid, args.d, args.restarts, args.seed, args.workers)["ppt_min"]
    return detect.region_curve(args.d, grid, ppt)


def cmd_region(args):
    curve = _region(args)
    if args.format == "json":
        return render_json(args, {"columns": curve.columns, "rows": curve.rows()}), EXIT_OK
    return render_csv(args, curve.columns, curve.rows()), EXIT_OK


def cmd_mc(args):
    rho, label = load_state(args)
    if rho.n != 2 or rho.dims[0] != rho.dims[1]:
        raise UsageError("Monte Carlo moments need a two-qudit state")
    d = rho.dims[0]
    rs = parse_r(args.r)
    obs = moments.moment_observable(d)
    est = moments.mc_moments(rho, obs, rs, args.samples, args.seed, args.workers)
    exact = moments.state_moments(rho)
    conv = moments.r_to_s(1.0, 1.0, d)
    analytic_r = {2: exact.s2 / conv.s2, 4: exact.s4 / conv.s4}
    payload = {
        "state": label,
        "d": d,
        "observable_eigenvalues": list(obs.eigenvalues),
        "estimates": [
            {"r": r, "mean": est[r].mean, "std_err": est[r].std_err, "analytic": analytic_r.get(r)} for r in rs
        ],
        "analytic_s": {"s2": exact.s2, "s4": exact.s4},
    }
    if 2 in est and 4 in est:
        mp = moments.mc_moment_pair(est, d, args.samples)
        payload["monte_carlo_s"] = {"s2": mp.s2, "s4": mp.s4, "std_err_s2": mp.std_err_s2, "std_err_s4": mp.std_err_s4}
    if args.format == "csv":
        rows = [(e["r"], e["mean"], e["std_err"], "" if e["analytic"] is None else e["analytic"]) for e in payload["estimates"]]
        return render_csv(args, ["r", "mean", "std_err", "analytic"], rows), EXIT_OK
    return render_json(args, payload), EXIT_OK


SECTOR_COLUMNS = [
    "A1",
    "A2",
    "A3",
    "facet_1-A1+A2-A3",
    "facet_3-A2",
    "facet_3(1+A3)-A1-A2",
    "facet_3-A3",
    "in_polytope",
    "full_sep_violated",
    "bisep_violated",
    "legacy_full_violated",
    "legacy_bisep_violated",
]


def sector_row(rho):
    s = sector_lengths(rho)
    a1, a2, a3 = s.A[1], s.A[2], s.A[3]
    facets = list(polytope.three_qubit_facets(a1, a2, a3).values())
    legacy = polytope.legacy_sector_tests(s)
    return [a1, a2, a3, *facets, 3 - a3, polytope.three_qubit_polytope_member(a1, a2, a3),
            polytope.full_sep_test(s).violated, polytope.bisep_test(s).violated,
            legacy[0].violated, legacy[1].violated]  # fmt: skip


def _gw_rows(args):
    grid = parse_grid(args.grid)
    rows = []
    for g in grid:
        for w in grid:
            if g + w <= 1 + 1e-12:
                rows.append([g, w] + sector_row(statezoo.noisy_ghz_w(g, min(w, 1 - g))))
    return rows


def cmd_sector(args):
    if args.scan_gw:
        rows = _gw_rows(args)
        cols = ["g", "w"] + SECTOR_COLUMNS
        if args.format == "json":
            return render_json(args, {"columns": cols, "rows": rows}), EXIT_OK
        return render_csv(args, cols, rows), EXIT_OK
    if args.state or args.file:
        rho, label = load_state(args)
    elif args.g is not None or args.w is not None:
        rho, label = statezoo.noisy_ghz_w(args.g or 0.0, args.w or 0.0), "noisy_ghz_w"
    else:
        raise UsageError("sector needs --state, --file, --g/--w or --scan-gw")
    if rho.n != 3 or set(rho.dims) != {2}:
        raise UsageError("sector criteria are for three-qubit states")
    row = sector_row(rho)
    if args.format == "csv":
        return render_csv(args, ["state"] + SECTOR_COLUMNS, [[label] + row]), EXIT_OK
    return render_json(args, {"state": label, **dict(zip(SECTOR_COLUMNS, row))}), EXIT_OK


def cmd_conjecture(args):
    res = optsearch.bisep_conjecture_scan(args.max_terms, args.restarts, args.seed, args.workers)
    code = EXIT_VIOLATION if res.best_value > optsearch.CONJECTURE_TOL else EXIT_OK
    payload = {"result": res.to_dict(), "violated": code == EXIT_VIOLATION}
    return render_json(args, payload), code


REGION_POINTS = {
    3: lambda p: [
        ("cross_hatch", statezoo.cross_hatch()),
        ("chessboard", statezoo.chessboard(**statezoo.CHESSBOARD_EXAMPLE)),
        ("upb_tiles", statezoo.upb_tiles()),
        (f"horodecki_3x3(p={p:g})", statezoo.horodecki_3x3(p)),
    ],
    4: lambda p: [("piani_4x4", statezoo.piani_4x4())],
}


def cmd_figure(args):
    from . import figures

    out_dir = args.out or "figures"
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def save(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)

    if args.kind == "region":
        curve = _region(args)
        pts = []
        for label, rho in REGION_POINTS[args.d](args.p):
            rep = detect.moment_witness(rho, label)
            pts.append((label, rep.moments.s2, rep.moments.s4, rep.ppt_min_eig, rep.verdicts["moments"] != detect.SEPARABLE))
        save(f"region_d{args.d}.csv", render_csv(args, curve.columns, curve.rows()))
        save(f"states_d{args.d}.csv", render_csv(args, ["state", "s2", "s4", "ppt_min_eig", "outside_separable"], pts))
        png = os.path.join(out_dir, f"region_d{args.d}.png")
        figures.plot_region(curve, [q[:3] for q in pts], png)
    else:
        rows = _gw_rows(args)
        cols = ["g", "w"] + SECTOR_COLUMNS
        save("sector_gw.csv", render_csv(args, cols, rows))
        png = os.path.join(out_dir, "sector_gw.png")
        figures.plot_sector_scan([dict(zip(cols, r)) for r in rows], png)
    written.append(png)
    sys.stdout.write("".join(f"{p}\n" for p in written))
    return None, EXIT_OK


# --- parser ----------------------------------------------------------------------


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--state", choices=statezoo.STATE_NAMES, help="named state")
    common.add_argument("--file", help="JSON state file {dims, re, im}")
    common.add_argument("--d", type=int, help="local dimension")
    common.add_argument("--g", type=float, help="GHZ weight")
    common.add_argument("--w", type=float, help="W weight")
    common.add_argument("--p", type=float, help="state parameter")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1, help="threads (results do not depend on it)")
    common.add_argument("--out", help="output file (directory for 'figure')")
    common.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="rmom", description="Entanglement detection from randomized-measurement moments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="run all detectors on a two-qudit state")
    p.set_defaults(func=cmd_analyze, default_format="json")

    grid_opts = _Parser(add_help=False)
    grid_opts.add_argument("--grid", default="0:1:101", help="A:B:STEPS over s2 (or g, w for the sector scan)")
    grid_opts.add_argument("--ppt", action="store_true", help="add the numerical PPT lower boundary")
    grid_opts.add_argument("--restarts", type=int, default=10)

    p = sub.add_parser("region", parents=[common, grid_opts], help="separable/general (S2, S4) boundaries")
    p.set_defaults(func=cmd_region, default_format="csv")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo randomized-measurement moments")
    p.add_argument("--r", default="2,4", help="comma-separated moment orders")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_mc, default_format="json")

    p = sub.add_parser("sector", parents=[common], help="three-qubit sector lengths and criteria")
    p.add_argument("--scan-gw", action="store_true", help="scan the noisy GHZ-W triangle")
    p.add_argument("--grid", default="0:1:51", help="A:B:STEPS for g and w")
    p.set_defaults(func=cmd_sector, default_format=None)

    p = sub.add_parser("conjecture", parents=[common], help="search for biseparability violations")
    p.add_argument("--max-terms", type=int, default=8)
    p.add_argument("--restarts", type=int, default=50)
    p.set_defaults(func=cmd_conjecture, default_format="json")

    p = sub.add_parser("figure", parents=[common, grid_opts], help="write figure data (CSV) and PNG plots")
    p.add_argument("--kind", choices=("region", "sector"), default="region")
    p.set_defaults(func=cmd_figure, default_format="csv")
    return parser


def _finish_args(args):
    if args.format is None:
        args.format = args.default_format or ("csv" if getattr(args, "scan_gw", False) else "json")
    del args.default_format
    if args.command == "figure":
        if args.kind == "sector":
            if args.grid == "0:1:101":
                args.grid = "0:1:51"
        else:
            args.d = 3 if args.d is None else args.d
            args.p = 3.5 if args.p is None else args.p
    if args.command == "region" and args.d is None:
        args.d = 3
    if args.command == "mc" and args.samples < moments.MC_BATCHES:
        raise UsageError(f"--samples must be at least {moments.MC_BATCHES}")
    if getattr(args, "restarts", 1) < 1:
        raise UsageError("--restarts must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    return args


def main(argv=None):
    try:
        args = _finish_args(build_parser().parse_args(argv))
        text, code = args.func(args)
        if text is not None:
            _emit(args, text)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

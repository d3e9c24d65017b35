"""Command-line front end.

Subcommands: schur, vertex, tau, identities, laxcheck, simulate.
Reports are JSON with a "schema" field; the generation timestamp is kept
on its own line at the top of the document (and as a comment line in CSV)
so byte-identical comparison of two runs only has to skip that line.
Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import QTodaError
from .opalg import SessionParams
from .partitions import Partition
from .schur import PowerSumRing
from .suites import identity_suite, laxcheck_suite, tau_shift_suite
from .vertex import VertexContext, tau_table
from .volterra import integrate, invariant_drift, perturbed_constant_state

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit_json(payload: dict, out: str | None):
    # generated_at first so it occupies its own (skippable) line
    doc = {"generated_at": _timestamp(), "schema": 1}
    doc.update(payload)
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _parse_partition(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_schur(args) -> int:
    ring = PowerSumRing(max(args.mu.weight, 1))
    poly = ring.schur(args.mu) if args.nu is None else ring.skew_schur(args.mu, args.nu)
    if args.json or args.out:
        _emit_json({"mu": str(args.mu), "nu": str(args.nu) if args.nu else None,
                    "polynomial": str(poly)}, args.out)
    else:
        print(poly)
    return EXIT_OK


def cmd_vertex(args) -> int:
    ctx = VertexContext(args.nu.weight + args.nubar.weight)
    lhs = ctx.vertex_def(args.nu, args.nubar)
    rhs = ctx.vertex_hook(args.nu, args.nubar)
    diff = lhs - rhs
    payload = {
        "nu": str(args.nu),
        "nubar": str(args.nubar),
        "defining_form": str(lhs),
        "hook_sum_form": str(rhs),
        "difference": str(diff),
        "equal": diff.is_zero(),
    }
    if args.json or args.out:
        _emit_json(payload, args.out)
    else:
        print("defining form:", payload["defining_form"])
        print("hook-sum form:", payload["hook_sum_form"])
        print("difference:   ", payload["difference"])
    return EXIT_OK if diff.is_zero() else EXIT_CHECK_FAILED


def cmd_tau(args) -> int:
    table = tau_table(args.a, args.b, args.sign, args.shift, args.deg)
    entries = {}
    for key in sorted(table.exponents):
        nu, nubar = Partition(key[0]), Partition(key[1])
        entries[f"{nu}|{nubar}"] = str(table.entry(nu, nubar))
    payload = {
        "a": args.a,
        "b": args.b,
        "sign": args.sign,
        "tau": str(table.tau),
        "shift": str(table.shift),
        "degree": args.deg,
        "cubic_prefactor_exponent": [str(c) for c in table.cubic],
        "entries": entries,
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_identities(args) -> int:
    report = identity_suite(
        weight_equality=args.weight,
        weight_symmetry=args.weight_sym,
        weight_schur=args.weight_schur,
        corrupt=args.self_test_corrupt,
    )
    if args.shift_check:
        sub = tau_shift_suite(1, 1, 1, min(args.weight, 4))
        report["checks"].extend(sub["checks"])
        report["passed"] = report["passed"] and sub["passed"]
    _emit_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_laxcheck(args) -> int:
    params = SessionParams(args.a, args.b, args.sign, T=args.T)
    if args.flow > 1:
        print(
            f"note: flow index {args.flow} needs tau-table degree >= {args.flow + 2}; "
            "cost grows quickly with the degree",
            file=sys.stderr,
        )
    report = laxcheck_suite(params, tau_degree=args.deg, flow_k=args.flow)
    _emit_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_simulate(args) -> int:
    state = perturbed_constant_state(
        args.a, args.b, args.sites, base=args.base, amplitude=args.amplitude,
        wavelength=args.wavelength,
    )
    params = SessionParams(args.a, args.b, 1, T=2)
    traj = integrate(state, args.flows, args.t_end, args.dt, params,
                     record_every=args.record_every)
    drift, series = invariant_drift(traj, args.a, args.b, args.invariants)

    csv_path = args.out_csv or f"simulate_a{args.a}_b{args.b}.csv"
    n = traj.states.shape[1]
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(f"# generated_at={_timestamp()}\n")
        head = ["time"] + [f"u_{j}" for j in range(n)] + [
            f"H_{k}" for k in range(1, args.invariants + 1)
        ]
        fh.write(",".join(head) + "\n")
        for idx, t in enumerate(traj.times):
            row = [repr(float(t))] + [repr(float(x)) for x in traj.states[idx]]
            row += [repr(float(h)) for h in series[idx]]
            fh.write(",".join(row) + "\n")

    payload = {
        "a": args.a,
        "b": args.b,
        "coarse_sites": args.sites,
        "refined_sites": n,
        "dt": args.dt,
        "t_end": args.t_end,
        "flow": args.flows,
        "invariants": series[0],
        "max_relative_drift": max(drift),
        "relative_drift": drift,
        "csv": csv_path,
    }
    if args.order_check:
        traj_half = integrate(state, args.flows, args.t_end, args.dt / 2, params,
                              record_every=2 * args.record_every)
        drift_half, _ = invariant_drift(traj_half, args.a, args.b, args.invariants)
        ratio = max(drift) / max(drift_half) if max(drift_half) > 0 else math.inf
        payload["half_step_max_relative_drift"] = max(drift_half)
        payload["order_check_ratio"] = ratio
    _emit_json(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_common_output(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument("--json", action="store_true", help="force JSON output on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtoda",
        description="Exact vertex/tau-function identities and Volterra-type lattice flows",
    )
    parser.add_argument("--version", action="version", version=f"qtoda {__version__}")
    parser.add_argument(
        "--config",
        help="INI file with one section per subcommand; command-line flags override",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schur", help="print a (skew) Schur polynomial in power sums")
    p.add_argument("--mu", type=_parse_partition, required=True, help='partition, e.g. "[2,1]"')
    p.add_argument("--nu", type=_parse_partition, default=None, help="inner partition (skew)")
    _add_common_output(p)
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("vertex", help="evaluate both vertex forms and their difference")
    p.add_argument("--nu", type=_parse_partition, required=True)
    p.add_argument("--nubar", type=_parse_partition, required=True)
    _add_common_output(p)
    p.set_defaults(func=cmd_vertex)

    p = sub.add_parser("tau", help="dump the tau coefficient table as JSON")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--shift", type=_parse_fraction, default=Fraction(0))
    p.add_argument("--deg", type=int, default=4)
    _add_common_output(p)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("identities", help="run the combinatorial identity suite")
    p.add_argument("--weight", type=int, default=6, help="total weight for vertex equality")
    p.add_argument("--weight-sym", type=int, default=5, help="total weight for symmetries")
    p.add_argument("--weight-schur", type=int, default=5)
    p.add_argument("--shift-check", action="store_true",
                   help="also verify the tau-table coordinate-shift identity")
    p.add_argument("--self-test-corrupt", action="store_true", help=argparse.SUPPRESS)
    _add_common_output(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("laxcheck", help="verify the operator relations at time zero")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--T", type=int, default=6, help="truncation order")
    p.add_argument("--deg", type=int, default=0,
                   help="tau-table degree for the dressing cross-check (0 skips it)")
    p.add_argument("--flow", type=int, default=1, help="flow index for the Lax-equation check")
    _add_common_output(p)
    p.set_defaults(func=cmd_laxcheck)

    p = sub.add_parser("simulate", help="integrate a reduced lattice flow")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--sites", type=int, default=12, help="coarse lattice circumference")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--flows", type=int, default=1, help="local flow index k (time t_{ka})")
    p.add_argument("--invariants", type=int, default=3)
    p.add_argument("--base", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--wavelength", type=int, default=12)
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--order-check", action="store_true",
                   help="rerun at dt/2 and report the drift ratio")
    p.add_argument("--out-csv", help="trajectory CSV path")
    _add_common_output(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Prepend defaults from the INI section of the chosen subcommand."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        parser.error("--config needs a path")
    cfg = configparser.ConfigParser()
    if not cfg.read(path):
        parser.error(f"cannot read config file {path}")
    rest = argv[:idx] + argv[idx + 2 :]
    command = next((tok for tok in rest if not tok.startswith("-")), None)
    if command is None or not cfg.has_section(command):
        return rest
    injected = []
    for key, value in cfg.items(command):
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            injected.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            injected.extend([flag, value])
    pos = rest.index(command) + 1
    return rest[:pos] + injected + rest[pos:]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QTodaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

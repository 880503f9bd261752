"""Command-line front end.

Subcommands: channel (run the spin channel once, JSON report), gates (dump a
gate matrix), mzi (double Mach-Zehnder CSV), engine (report / sweep /
frontier / optimize). All angles are radians. CSV output uses 12 significant
digits, a header row, and a trailing comment line recording the flags; given
identical flags the output is byte-identical across runs.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys

import numpy as np

from . import engine as eng
from .channel import report_to_json
from .circuits import CNOT_UP, HBAR, build_SWAP, build_UD, build_VD, u14
from .interferometer import MziConfig, run_double_mzi
from .qmatrix import ParameterError, matrix_to_json, von_neumann_entropy
from .spin_demon import SpinDemonParams, demon_state_from_spec, scatter

EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


def _fmt(x) -> str:
    if isinstance(x, float) and x != x:  # NaN
        return "nan"
    return f"{x:.12g}"


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv(rows: list[dict], argv: list[str], footer: list[str] = ()) -> str:
    header = list(rows[0].keys()) if rows else []
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[k]) for k in header))
    lines.extend(footer)
    lines.append("# flags: " + shlex.join(argv))
    return "\n".join(lines) + "\n"


def _spin_params(args) -> SpinDemonParams:
    return SpinDemonParams(theta=args.theta, eta=args.eta, phi=args.phi,
                           alpha=args.alpha, beta_phase=args.beta_phase)


def _demon_from_args(parser, spec: list[str]) -> np.ndarray:
    kind = spec[0]
    try:
        if kind in ("up", "down"):
            if len(spec) != 1:
                parser.error(f"--demon {kind} takes no extra values")
            return demon_state_from_spec(kind)
        if kind == "mixture":
            if len(spec) != 2:
                parser.error("--demon mixture needs one weight")
            return demon_state_from_spec("mixture", spec[1])
        if kind == "superposition":
            if len(spec) != 3:
                parser.error("--demon superposition needs two amplitudes")
            return demon_state_from_spec("superposition", (float(spec[1]), float(spec[2])))
    except (ParameterError, ValueError) as exc:
        parser.error(str(exc))
    parser.error(f"unknown demon kind {kind!r}")


def _input_state(parser, args) -> np.ndarray:
    if args.input == "chaotic":
        return np.eye(2, dtype=complex) / 2.0
    if args.input == "up":
        return np.diag([1.0, 0.0]).astype(complex)
    if args.input == "down":
        return np.diag([0.0, 1.0]).astype(complex)
    if args.input == "pure":
        if args.amplitudes is None:
            parser.error("--input pure requires --amplitudes RE IM RE IM")
        a = complex(args.amplitudes[0], args.amplitudes[1])
        b = complex(args.amplitudes[2], args.amplitudes[3])
        vec = np.array([a, b])
        norm = np.linalg.norm(vec)
        if norm == 0:
            parser.error("pure input amplitudes must not both vanish")
        vec = vec / norm
        return np.outer(vec, vec.conj())
    parser.error(f"unknown input {args.input!r}")


def cmd_channel(parser, args, argv) -> int:
    demon = _demon_from_args(parser, args.demon)
    rho_in = _input_state(parser, args)
    report = scatter(rho_in, demon, _spin_params(args))
    doc = report_to_json(report)
    doc["entropy_in"] = von_neumann_entropy(rho_in)
    doc["flags_cli"] = shlex.join(argv)
    _write(args.output, json.dumps(doc, indent=2) + "\n")
    return 0


_GATES = {
    "UD": lambda phase: build_UD(),
    "VD": lambda phase: build_VD(),
    "SWAP": lambda phase: build_SWAP(),
    "CNOT": lambda phase: CNOT_UP,
    "HBAR": lambda phase: HBAR,
    "U14": u14,
}


def cmd_gates(parser, args, argv) -> int:
    matrix = _GATES[args.which](args.phase)
    if args.format == "json":
        doc = matrix_to_json(matrix)
        doc["gate"] = args.which
        _write(args.output, json.dumps(doc, indent=2) + "\n")
    else:
        rows = []
        for i, row in enumerate(matrix):
            entry = {"row": i}
            for j, z in enumerate(row):
                entry[f"re{j}"] = float(z.real)
                entry[f"im{j}"] = float(z.imag)
            rows.append(entry)
        _write(args.output, _csv(rows, argv))
    return 0


def cmd_mzi(parser, args, argv) -> int:
    try:
        config = MziConfig(chi=args.chi, epsilon=args.epsilon,
                           flux_samples=args.flux_steps,
                           params=_spin_params(args),
                           arm_phase=args.arm_phase,
                           bypass_demon=args.bypass_demon)
    except ParameterError as exc:
        parser.error(str(exc))
    report = run_double_mzi(config)
    rows = [{"flux_rad": f, "p3": p3, "p4": p4}
            for f, p3, p4 in zip(report.flux, report.p3, report.p4)]
    footer = [f"# visibility = {_fmt(report.visibility)}"]
    _write(args.output, _csv(rows, argv, footer=footer))
    return 0


def _cycle_json(report: eng.CycleReport) -> dict:
    return {
        "p_e": report.p_e, "p_g": report.p_g, "heat": report.heat,
        "w_minus": report.w_minus, "w_plus": report.w_plus,
        "w_out": report.w_out, "w_in": report.w_in,
        "net_work": report.net_work,
        "eta_local": report.eta_local, "eta_2cy": report.eta_2cy,
        "dit_out_entropy": report.dit_out_entropy,
        "field_ledger": {name: value for name, value in report.field_ledger},
    }


def cmd_engine(parser, args, argv) -> int:
    bd_delta = args.beta_d_delta[0]
    if args.mode == "report":
        _, p_e, _ = eng.thermal_wit(args.beta_delta, 1.0)
        try:
            eps = eng.resolve_epsilon(args.policy, p_e, bd_delta)
            report = eng.run_cycle(eng.EngineParams(
                beta=args.beta_delta, beta_d=bd_delta, delta_w=1.0, epsilon=eps))
        except eng.ConvergenceError as exc:
            sys.stderr.write(f"non-convergence: {exc}\n")
            return EXIT_NO_CONVERGENCE
        doc = _cycle_json(report)
        doc["epsilon"] = eps
        doc["policy"] = args.policy
        _write(args.output, json.dumps(doc, indent=2) + "\n")
        return 0

    if args.mode == "sweep":
        grid = np.linspace(args.beta_min, bd_delta * args.beta_max_frac, args.steps)
        try:
            rows = eng.sweep_beta(bd_delta, args.policy, grid)
        except eng.ConvergenceError as exc:
            sys.stderr.write(f"non-convergence: {exc}\n")
            return EXIT_NO_CONVERGENCE
        _write(args.output, _csv(rows, argv))
        return 0

    if args.mode == "frontier":
        if args.pe is not None:
            pes = [args.pe]
        else:
            pes = np.linspace(args.pe_min, 0.5, args.steps)
        rows = eng.frontier_epsilons(pes, args.beta_d_delta)
        bad = [r for r in rows if any(v != v for v in r.values())]
        if bad:
            sys.stderr.write(f"non-convergence on {len(bad)} rows\n")
            return EXIT_NO_CONVERGENCE
        _write(args.output, _csv(rows, argv))
        return 0

    # optimize
    _, p_e, _ = eng.thermal_wit(args.beta_delta, 1.0)
    pe = args.pe if args.pe is not None else p_e
    if args.target == "power":
        result = eng.optimize_epsilon_power(pe, bd_delta)
    else:
        result = eng.optimize_epsilon_eta(pe)
    doc = {
        "epsilon_star": result.epsilon_star,
        "objective_value": result.objective_value,
        "converged": result.converged,
        "iterations": result.iterations,
        "residual": result.residual,
        "roots": list(result.roots),
        "target": args.target,
        "p_e": pe,
        "beta_d_delta": bd_delta,
    }
    _write(args.output, json.dumps(doc, indent=2) + "\n")
    if not result.converged:
        sys.stderr.write(
            f"non-convergence: residual {result.residual:.3e}\n")
        return EXIT_NO_CONVERGENCE
    return 0


def _add_spin_flags(p: argparse.ArgumentParser):
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta-phase", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdemon",
        description="Purity-swapping channel, circuits, interferometer and engine "
                    "(angles in radians; energies in units of the level spacing).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_chan = sub.add_parser("channel", help="run the spin channel once (JSON report)")
    _add_spin_flags(p_chan)
    p_chan.add_argument("--input", default="chaotic",
                        choices=["chaotic", "up", "down", "pure"])
    p_chan.add_argument("--amplitudes", type=float, nargs=4, metavar=("ARE", "AIM", "BRE", "BIM"))
    p_chan.add_argument("--demon", nargs="+", default=["up"],
                        metavar="KIND [VAL ...]")
    p_chan.add_argument("--output", default=None)

    p_gates = sub.add_parser("gates", help="dump a gate or circuit matrix")
    p_gates.add_argument("--which", required=True, choices=sorted(_GATES))
    p_gates.add_argument("--phase", type=float, default=-np.pi / 2)
    p_gates.add_argument("--format", default="json", choices=["json", "csv"])
    p_gates.add_argument("--output", default=None)

    p_mzi = sub.add_parser("mzi", help="double Mach-Zehnder visibility CSV")
    _add_spin_flags(p_mzi)
    p_mzi.set_defaults(eta=np.pi)
    p_mzi.add_argument("--chi", type=float, default=np.pi / 2)
    p_mzi.add_argument("--epsilon", type=float, default=0.0)
    p_mzi.add_argument("--flux-steps", type=int, default=96)
    p_mzi.add_argument("--arm-phase", type=float, default=np.pi / 2)
    p_mzi.add_argument("--bypass-demon", action="store_true")
    p_mzi.add_argument("--output", default=None)

    p_eng = sub.add_parser("engine", help="two-cycle engine reports and sweeps")
    p_eng.add_argument("mode", choices=["report", "sweep", "frontier", "optimize"])
    p_eng.add_argument("--beta-delta", type=float, default=1e-6,
                       help="beta * delta_w of the working reservoir")
    p_eng.add_argument("--beta-d-delta", type=float, nargs="+", default=[2.0],
                       help="beta_d * delta_w (several values allowed for frontier)")
    p_eng.add_argument("--policy", default="ideal",
                       help="ideal | opt-power | opt-eta | fixed:<eps>")
    p_eng.add_argument("--pe", type=float, default=None)
    p_eng.add_argument("--pe-min", type=float, default=0.3)
    p_eng.add_argument("--beta-min", type=float, default=0.0)
    p_eng.add_argument("--beta-max-frac", type=float, default=1.0,
                       help="sweep up to this fraction of beta_d")
    p_eng.add_argument("--steps", type=int, default=101)
    p_eng.add_argument("--target", default="power", choices=["power", "eta"])
    p_eng.add_argument("--output", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "channel":
            return cmd_channel(parser, args, argv)
        if args.command == "gates":
            return cmd_gates(parser, args, argv)
        if args.command == "mzi":
            return cmd_mzi(parser, args, argv)
        return cmd_engine(parser, args, argv)
    except ParameterError as exc:
        parser.error(str(exc))
    except eng.ConvergenceError as exc:
        sys.stderr.write(f"non-convergence: {exc}\n")
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())

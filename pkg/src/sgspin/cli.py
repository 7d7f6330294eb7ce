"""Command-line front end.

    sgspin evolve --omega0 1 --omega 2 --theta 1.0471975512 --t-end 5 --points 501 --format csv
    sgspin cascade --stages 3 --omega0 1 --omega 2 --theta-deg 60 --t-end 1
    sgspin synthesize --gate not --a0 0.8i --a1 0.6 --omega0 1 --omega 2

Every option may also come from ``--config FILE``, a flat ``key = value``
file using the flag names (``omega0 = 1``, ``t-end = 5``); flags given on the
command line win.  Without ``--output`` results go to
``$SGSPIN_OUTPUT_DIR/<command>.<format>`` (or the working directory).

Exit codes: 0 success, 2 invalid input, 3 numerical failure (the partial
report is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    BasisMode,
    Branch,
    ControlParams,
    QubitState,
    adiabaticity_report,
    basis_sweep,
    branch_coefficients,
    instantaneous_basis,
    project,
    rabi_frequency,
    spin_propagator,
)
from .ensemble import adiabatic_split, cascade, cluster_counts, nonadiabatic_multiply
from .errors import Infeasible, NotFound, SgspinError, StepUnderflow
from .gates import (
    GateKind,
    GateSpec,
    ParameterBox,
    ideal_output,
    solve_gate_time,
    synthesize_general,
    verify_gate,
)
from .io import csv_text, json_text, write_atomic
from .ode import ode_trajectory
from .swap import build_swap_outputs, concurrence, extend_swap_family

OUTPUT_DIR_ENV = "SGSPIN_OUTPUT_DIR"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

# acceptance grid for the closed-form vs integrator sweep
SWEEP_OMEGA0 = (0.5, 1.0, 2.0, 4.0, 8.0)
SWEEP_RATIO = (0.1, 0.5, 1.0, 2.0, 5.0)
SWEEP_THETA = (0.1, 0.6, 1.0, math.pi / 2, 2.6)


class ConfigError(ValueError):
    pass


class NumericalFailure(Exception):
    """Carries the partial payload that should still be written."""

    def __init__(self, payload, cause):
        super().__init__(str(cause))
        self.payload = payload
        self.cause = cause


def parse_complex(text: str) -> complex:
    """Accept 0.6, 0.8i, 0.6+0.8j and similar."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list: {text!r}") from None


def parse_interval(text: str) -> tuple[float, float]:
    vals = parse_floats(text)
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"interval needs 'lo,hi': {text!r}")
    return vals


def _registry(parser) -> dict:
    # per-subcommand dest -> (converter, default), so config values share the flag parsers
    opts = parser.get_default("_opts")
    if opts is None:
        opts = {}
        parser.set_defaults(_opts=opts)
    return opts


def _opt(parser, flag, type=str, default=None, **kw):
    dest = flag.lstrip("-").replace("-", "_")
    _registry(parser)[dest] = (type, default)
    parser.add_argument(flag, dest=dest, type=type, default=None, **kw)


def _flag(parser, flag, help):
    dest = flag.lstrip("-").replace("-", "_")
    _registry(parser)[dest] = (_parse_bool, False)
    parser.add_argument(flag, dest=dest, action="store_true", default=None, help=help)


def _add_drive(p):
    _opt(p, "--omega0", float, 1.0, help="Larmor frequency")
    _opt(p, "--omega", float, 2.0, help="field rotation rate")
    _opt(p, "--theta", float, math.pi / 3, help="field tilt in radians")
    _opt(p, "--theta-deg", float, None, help="field tilt in degrees (overrides --theta)")


def _add_time(p):
    _opt(p, "--t-start", float, 0.0)
    _opt(p, "--t-end", float, 5.0)
    _opt(p, "--points", int, 101)
    _flag(p, "--scaled-time", "read times in units of 1/omega0")


def _add_state(p, default0=1.0, default1=0.0):
    _opt(p, "--a0", parse_complex, complex(default0))
    _opt(p, "--a1", parse_complex, complex(default1))


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgspin", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--config", type=Path, default=None, help="key = value file")
        _opt(p, "--output", Path, None, help="output file")
        _opt(p, "--format", str, fmt, choices=["json", "csv"])
        _opt(p, "--seed", int, 0)
        _opt(p, "--tol", float, 1e-9, help="integrator tolerance")

    p = sub.add_parser("evolve", help="coefficient time series in the eigenbasis")
    common(p, "csv")
    _add_drive(p)
    _add_time(p)
    _add_state(p)
    _opt(p, "--method", str, "analytic", choices=["analytic", "ode"])
    _opt(p, "--basis", str, "corotating", choices=["corotating", "exact"])

    p = sub.add_parser("adiabaticity", help="closed-form and numeric adiabaticity")
    common(p)
    _add_drive(p)
    _add_time(p)
    _opt(p, "--threshold", float, 0.1)

    p = sub.add_parser("multiply", help="one non-adiabatic multiplier stage")
    common(p)
    _add_drive(p)
    _add_time(p)
    _add_state(p, 1 / math.sqrt(2), 1 / math.sqrt(2))
    _opt(p, "--ensemble", int, 0, help="ensemble size N for cluster counts")
    _flag(p, "--sampling", "multinomial cluster counts drawn with --seed")

    p = sub.add_parser("cascade", help="n multiplier stages, 2**n clusters")
    common(p)
    _add_drive(p)
    _add_time(p)
    _add_state(p, 1 / math.sqrt(2), 1 / math.sqrt(2))
    _opt(p, "--stages", int, 1)

    p = sub.add_parser("synthesize", help="gate timing or general parameter search")
    common(p)
    _opt(p, "--gate", str, "not", choices=["not", "z", "hadamard", "general"])
    _opt(p, "--mode", str, "literal", choices=["literal", "relaxed"])
    _opt(p, "--omega0", float, 1.0)
    _opt(p, "--omega", float, 2.0)
    _add_state(p)
    _opt(p, "--target-a0", parse_complex, 0j)
    _opt(p, "--target-a1", parse_complex, 1 + 0j)
    _opt(p, "--bounds-omega0", parse_interval, (1.0, 1.0))
    _opt(p, "--bounds-omega", parse_interval, (0.5, 4.0))
    _opt(p, "--bounds-theta", parse_interval, (0.0, math.pi))
    _opt(p, "--bounds-t", parse_interval, (0.0, 10.0))
    _flag(p, "--verify", "cross-check with the integrator")

    p = sub.add_parser("swap", help="swap outputs and the four-state family")
    common(p)
    _add_drive(p)
    _opt(p, "--t", float, 0.0)
    _opt(p, "--a", parse_complex, complex(1 / math.sqrt(2)))
    _opt(p, "--b", parse_complex, complex(1 / math.sqrt(2)))
    _opt(p, "--particle", int, 2, choices=[2, 3])

    p = sub.add_parser("sweep", help="closed form vs integrator over a parameter grid")
    common(p, "csv")
    _opt(p, "--omega0-list", parse_floats, SWEEP_OMEGA0)
    _opt(p, "--ratio-list", parse_floats, SWEEP_RATIO)
    _opt(p, "--theta-list", parse_floats, SWEEP_THETA)
    _opt(p, "--points", int, 50)
    _opt(p, "--phase-max", float, 20.0, help="largest wbar * t on the time grid")
    _opt(p, "--branch", str, "up", choices=["up", "down", "both"])
    _opt(p, "--workers", int, 1)
    return parser


def read_config(path: Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from defaults."""
    config = read_config(args.config) if args.config else {}
    opts = args._opts
    known = set(opts)
    for key in config:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} for '{args.command}'")
    for dest in known:
        if getattr(args, dest) is not None:
            continue
        conv, default = opts[dest]
        if dest in config:
            try:
                value = conv(config[dest])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise ConfigError(f"config {dest}: {exc}") from None
        else:
            value = default
        setattr(args, dest, value)
    return args


def _params(args) -> ControlParams:
    theta = math.radians(args.theta_deg) if args.theta_deg is not None else args.theta
    return ControlParams(args.omega0, args.omega, theta)


def _times(args, params) -> np.ndarray:
    if args.points < 2:
        raise ConfigError("points must be >= 2")
    if not args.t_end > args.t_start >= 0:
        raise ConfigError("need t_end > t_start >= 0")
    times = np.linspace(args.t_start, args.t_end, args.points)
    return times / params.omega0 if args.scaled_time else times


def _state(a0, a1) -> QubitState:
    return QubitState(a0, a1).check_normalized(1e-9).normalized()


def _params_dict(params: ControlParams) -> dict:
    return {"omega0": params.omega0, "omega": params.omega, "theta": params.theta}


def cmd_evolve(args):
    params = _params(args)
    times = _times(args, params)
    start = _state(args.a0, args.a1)
    if args.method == "analytic":
        coeffs = np.array([spin_propagator(params, t) @ start.vector for t in times])
    else:
        basis0 = instantaneous_basis(params, float(times[0]), BasisMode.COROTATING)
        psi0 = QubitState.from_vector(
            start.a0 * basis0.state0.vector + start.a1 * basis0.state1.vector
        )
        traj = ode_trajectory(params, psi0, times, tol=args.tol)
        mode = BasisMode.COROTATING if args.basis == "corotating" else BasisMode.EXACT
        coeffs = np.array(
            [project(traj.state(i), pair) for i, pair in enumerate(basis_sweep(params, times, mode))]
        )
    rows = [
        (float(t), c0.real, c0.imag, c1.real, c1.imag, abs(c0) ** 2, abs(c1) ** 2)
        for t, (c0, c1) in zip(times, coeffs)
    ]
    header = ("t", "re_c0", "im_c0", "re_c1", "im_c1", "p0", "p1")
    if args.format == "csv":
        return header, rows
    return {
        "command": "evolve",
        "params": _params_dict(params),
        "method": args.method,
        "input": start,
        "rows": [
            {"t": r[0], "c0": complex(r[1], r[2]), "c1": complex(r[3], r[4]), "p0": r[5], "p1": r[6]}
            for r in rows
        ],
    }


def cmd_adiabaticity(args):
    params = _params(args)
    times = _times(args, params)
    report = adiabaticity_report(params, times, args.threshold)
    bc = branch_coefficients(params, times, Branch.UP)
    payload = {
        "command": "adiabaticity",
        "params": _params_dict(params),
        "rabi_frequency": rabi_frequency(params),
        "report": report,
        "max_transition_population": float(np.max(bc.populations[1])),
    }
    if args.format == "csv":
        header = ("closed_form", "numeric_max", "is_adiabatic", "threshold")
        return header, [(report.closed_form, report.numeric_max, int(report.is_adiabatic), report.threshold)]
    return payload


def cmd_multiply(args):
    params = _params(args)
    t = _times(args, params)[-1]
    q = _state(args.a0, args.a1)
    out = nonadiabatic_multiply(params, q, float(t))
    payload = {
        "command": "multiply",
        "params": _params_dict(params),
        "t": float(t),
        "input": q,
        "up": {"state": out.up, "weight": out.probs[0]},
        "down": {"state": out.down, "weight": out.probs[1]},
    }
    if args.ensemble:
        rng = np.random.default_rng(args.seed) if args.sampling else None
        report = cluster_counts(adiabatic_split(q), args.ensemble, rng)
        payload["clusters"] = {"N": args.ensemble, "n_up": report.n_up, "n_down": report.n_down}
    if args.format == "csv":
        header = ("branch", "weight", "re_a0", "im_a0", "re_a1", "im_a1")
        rows = [
            (name, w, s.a0.real, s.a0.imag, s.a1.real, s.a1.imag)
            for name, s, w in (("up", out.up, out.probs[0]), ("down", out.down, out.probs[1]))
        ]
        return header, rows
    return payload


def cmd_cascade(args):
    params = _params(args)
    t = float(_times(args, params)[-1])
    if args.stages < 0:
        raise ConfigError("stages must be >= 0")
    q = _state(args.a0, args.a1)
    clusters = cascade([(params, t)] * args.stages, q)
    if args.format == "csv":
        header = ("index", "path", "weight", "re_a0", "im_a0", "re_a1", "im_a1")
        rows = [
            (i, _path(i, args.stages), w, s.a0.real, s.a0.imag, s.a1.real, s.a1.imag)
            for i, (s, w) in enumerate(clusters)
        ]
        return header, rows
    return {
        "command": "cascade",
        "params": _params_dict(params),
        "t": t,
        "stages": args.stages,
        "input": q,
        "n_clusters": len(clusters),
        "weight_sum": math.fsum(w for _, w in clusters),
        "clusters": [
            {"index": i, "path": _path(i, args.stages), "weight": w, "state": s}
            for i, (s, w) in enumerate(clusters)
        ],
    }


def _path(index: int, depth: int) -> str:
    return "".join("ud"[int(b)] for b in format(index, f"0{depth}b")) if depth else ""


def cmd_synthesize(args):
    q = _state(args.a0, args.a1)
    payload = {"command": "synthesize", "gate": args.gate, "input": q}
    try:
        if args.gate == "general":
            target = _state(args.target_a0, args.target_a1)
            payload["target"] = target
            box = ParameterBox(args.bounds_omega0, args.bounds_omega, args.bounds_theta, args.bounds_t)
            result = synthesize_general(q, target, box)
            expected = target
        else:
            spec = GateSpec(GateKind(args.gate), q)
            payload["mode"] = args.mode
            result = solve_gate_time(spec, args.omega0, args.omega, mode=args.mode)
            expected = ideal_output(spec)
    except Infeasible as exc:
        payload.update(status="infeasible", diagnosis=exc.reason.name, detail=exc.detail)
        raise NumericalFailure(payload, exc) from None
    except NotFound as exc:
        payload.update(status="not_found", result=_result_dict(exc.best))
        raise NumericalFailure(payload, exc) from None
    payload.update(status="solved", result=_result_dict(result))
    if args.verify:
        payload["verification"] = verify_gate(result, expected, tol=args.tol)
    if args.format == "csv":
        r = payload["result"]
        header = ("status", "omega0", "omega", "theta", "tau", "residual")
        return header, [("solved", r["params"]["omega0"], r["params"]["omega"], r["params"]["theta"], r["tau"], r["residual"])]
    return payload


def _result_dict(result) -> dict:
    return {
        "params": _params_dict(result.params),
        "tau": result.tau,
        "predicted_output": result.predicted_output,
        "residual": result.residual,
        "hold_hamiltonian": result.hold_hamiltonian,
    }


def cmd_swap(args):
    params = _params(args)
    bases = build_swap_outputs(args.a, args.b)
    family = extend_swap_family(params, args.t, args.a, args.b, particle=args.particle)
    labels = [f"base{i}_{br}" for i in (1, 2) for br in ("up", "down")]
    if args.format == "csv":
        header = ("name", "concurrence") + tuple(
            f"{part}_{k}" for k in ("00", "01", "10", "11") for part in ("re", "im")
        )
        rows = []
        for name, s in [("base1", bases[0]), ("base2", bases[1])] + list(zip(labels, family)):
            flat = [v for a in s.amps for v in (a.real, a.imag)]
            rows.append((name, concurrence(s), *flat))
        return header, rows
    return {
        "command": "swap",
        "params": _params_dict(params),
        "t": args.t,
        "particle": args.particle,
        "a": args.a,
        "b": args.b,
        "base": [{"amps": s.amps, "concurrence": concurrence(s)} for s in bases],
        "family": [
            {"name": name, "amps": s.amps, "concurrence": concurrence(s)}
            for name, s in zip(labels, family)
        ],
    }


def sweep_point(omega0, ratio, theta, points, phase_max, branch, tol):
    """Rows comparing closed-form and integrated transition populations."""
    params = ControlParams(omega0, ratio * omega0, theta)
    wbar = rabi_frequency(params)
    t_max = phase_max / wbar if wbar > 0 else phase_max / omega0
    times = np.linspace(0.0, t_max, points)
    bases = basis_sweep(params, times, BasisMode.EXACT)
    rows = []
    for br in ((Branch.UP, Branch.DOWN) if branch == "both" else (Branch(branch),)):
        start = bases[0].state0 if br is Branch.UP else bases[0].state1
        traj = ode_trajectory(params, start, times, tol=tol)
        bc = branch_coefficients(params, times, br)
        # population that left the starting level
        p_analytic = bc.populations[1] if br is Branch.UP else bc.populations[0]
        for i, t in enumerate(times):
            c0, c1 = project(traj.state(i), bases[i])
            p_ode = abs(c1) ** 2 if br is Branch.UP else abs(c0) ** 2
            rows.append(
                (br.value, omega0, params.omega, theta, float(t), float(p_analytic[i]), p_ode,
                 abs(float(p_analytic[i]) - p_ode))
            )
    return rows


def cmd_sweep(args):
    if args.points < 2:
        raise ConfigError("points must be >= 2")
    grid = [
        (w0, r, th, args.points, args.phase_max, args.branch, args.tol)
        for w0 in args.omega0_list
        for r in args.ratio_list
        for th in args.theta_list
    ]
    for w0, r, th, *_ in grid:
        ControlParams(w0, r * w0, th)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            chunks = list(pool.map(sweep_point, *zip(*grid)))
    else:
        chunks = [sweep_point(*g) for g in grid]
    rows = [row for chunk in chunks for row in chunk]
    header = ("branch", "omega0", "omega", "theta", "t", "p_analytic", "p_ode", "abs_err")
    if args.format == "csv":
        return header, rows
    return {
        "command": "sweep",
        "max_abs_err": max(r[-1] for r in rows),
        "rows": [dict(zip(header, r)) for r in rows],
    }


COMMANDS = {
    "evolve": cmd_evolve,
    "adiabaticity": cmd_adiabaticity,
    "multiply": cmd_multiply,
    "cascade": cmd_cascade,
    "synthesize": cmd_synthesize,
    "swap": cmd_swap,
    "sweep": cmd_sweep,
}


def _render(result, fmt: str) -> str:
    if fmt == "csv":
        if isinstance(result, dict):
            return csv_text(("key", "value"), sorted((k, str(v)) for k, v in result.items()))
        return csv_text(*result)
    if isinstance(result, tuple):
        header, rows = result
        return json_text([dict(zip(header, r)) for r in rows])
    return json_text(result)


def _output_path(args) -> Path:
    if args.output is not None:
        return args.output
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"{args.command}.{args.format}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        result = COMMANDS[args.command](args)
    except NumericalFailure as exc:
        write_atomic(_output_path(args), _render(exc.payload, "json" if args.format == "json" else "csv"))
        print(f"sgspin: numerical failure: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StepUnderflow as exc:
        write_atomic(
            _output_path(args),
            _render({"command": args.command, "status": "step_underflow", "detail": str(exc)}, args.format),
        )
        print(f"sgspin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SgspinError, ValueError) as exc:
        print(f"sgspin: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    path = write_atomic(_output_path(args), _render(result, args.format))
    print(path, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

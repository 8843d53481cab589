"""Command-line entry point: ``mutualgp {fig1,verify,point,er}``."""
from __future__ import annotations

import argparse
import ast
import contextlib
import json
import math
import operator
import sys

import numpy as np

from . import verify as verify_mod
from .closed_form import (
    composite_gp,
    s_state_gp,
    s_state_subsystem_gp,
    subsystem_gp,
    w_state_gp,
    w_state_subsystem_gp,
)
from .core import (
    PRINCIPAL,
    UNWRAPPED,
    Angle,
    DickeSuperposition,
    LocalLoop,
    angular_distance,
    load_state,
    reduced_qubit,
    wrap,
)
from .entanglement import attribute, er_s_state, er_w_state, inverse_er_s
from .errors import DegenerateSubsystem, PhaseError
from .sweeps import FAMILIES, SweepSpec, diagnostics
from .sweeps import cmd_fig1 as run_fig1

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_real(text: str) -> float:
    """Number or arithmetic expression in ``pi`` such as ``-pi/3`` or ``0.25*pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"cannot parse {text!r}")
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except SyntaxError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r}") from exc


def parse_list(text: str) -> list[float]:
    return [parse_real(t) for t in text.split(",") if t.strip()]


def parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like 401x201, got {text!r}") from exc


def _family(text: str) -> str:
    f = text.upper()
    if f not in FAMILIES:
        raise argparse.ArgumentTypeError(f"family must be s or w, got {text!r}")
    return f


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", type=_family, help="s or w")
    p.add_argument("--n", type=int, help="number of qubits")
    p.add_argument("--k", type=parse_real, help="excitations (W family)")
    p.add_argument("--r", type=parse_real, help="marginal Bloch length (S family)")
    p.add_argument("--branch", choices=(PRINCIPAL, UNWRAPPED), default=UNWRAPPED)
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mutualgp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", help="mutual phase over (entanglement, gamma) as CSV")
    _common(p)
    p.add_argument("--grid", type=parse_grid, default=(401, 201), help="GAMMAxENT points")
    p.add_argument("--gamma-min", type=parse_real, default=-math.pi)
    p.add_argument("--gamma-max", type=parse_real, default=math.pi)
    p.add_argument("--diagnostics", action="store_true",
                   help="print structural checks (N = 11, 31, 51) as JSON lines on stderr")

    p = sub.add_parser("verify", help="closed form vs statevector oracle suites")
    _common(p)
    p.add_argument("mode", choices=verify_mod.MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--tol", type=float)
    p.add_argument("--cases", type=int, help="number of random cases")
    p.add_argument("--max-qubits", type=int, default=verify_mod.MAX_QUBITS)

    p = sub.add_parser("point", help="phases of one state and loop as JSON")
    _common(p)
    p.add_argument("--state", help="JSON state file {'n': N, 'amps': [[re, im], ...]}")
    p.add_argument("--gamma", type=parse_list, help="loop phase, one value or one per site")
    p.add_argument("--alpha", type=parse_list, help="tilt angle(s) of the precession loop")
    p.add_argument("--oracle", action="store_true", help="append statevector oracle values")
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--max-qubits", type=int, default=verify_mod.MAX_QUBITS)

    p = sub.add_parser("er", help="relative entropy of entanglement")
    _common(p)
    p.add_argument("--e-r", type=parse_real, help="invert E_R -> r (S family)")
    return parser


def _open_out(path):
    return contextlib.nullcontext(sys.stdout) if path in (None, "-") else open(path, "w")


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"missing {' '.join(missing)}")


def cmd_fig1(args) -> int:
    _need(args, "family")
    gp, ep = args.grid
    spec = SweepSpec(args.family, args.n or 51, args.gamma_min, args.gamma_max, gp, ep,
                     args.branch, None)
    grid = run_fig1(spec)
    with _open_out(args.out) as fh:
        fh.write(grid.to_csv())
    if args.diagnostics:
        for rec in diagnostics(gamma_points=gp, ent_points=ep):
            sys.stderr.write(json.dumps(rec) + "\n")
    return 0


def cmd_verify(args) -> int:
    _need(args, "n")
    with _open_out(args.out) as fh:
        return verify_mod.run(args.mode, args.n, seed=args.seed, steps=args.steps, tol=args.tol,
                              cases=args.cases, stream=fh, max_qubits=args.max_qubits)


def _point_state(args) -> tuple[DickeSuperposition | None, str | None]:
    if args.state is not None:
        return load_state(args.state), None
    _need(args, "family", "n")
    n = args.n
    if args.family == "S":
        _need(args, "r")
        return DickeSuperposition.s_state(n, args.r), "S"
    _need(args, "k")
    k = args.k
    state = DickeSuperposition.dicke(n, int(k)) if float(k).is_integer() else None
    return state, "W"


def _loop_phases(args, n: int) -> tuple[np.ndarray, np.ndarray | None]:
    from .sim import pt_alpha_for_phase, pt_loop_phase
    if (args.gamma is None) == (args.alpha is None):
        raise ValueError("give exactly one of --gamma or --alpha")
    vals = args.gamma if args.gamma is not None else args.alpha
    if len(vals) not in (1, n):
        raise ValueError(f"need 1 or {n} values, got {len(vals)}")
    vals = np.broadcast_to(np.asarray(vals, dtype=float), (n,)).copy()
    if args.alpha is not None:
        return np.asarray(pt_loop_phase(vals)), vals
    return vals, np.array([pt_alpha_for_phase(g) for g in vals])


def point_report(args) -> dict:
    """Phase data of one configuration (see ``mutualgp point --help``)."""
    state, family = _point_state(args)
    n = state.n_qubits if state is not None else args.n
    gammas, alphas = _loop_phases(args, n)
    uniform = bool(np.all(gammas == gammas[0]))
    branch = args.branch
    out: dict = {"n": n, "branch": branch, "gammas": gammas.tolist()}

    if family is not None and uniform:
        g = float(gammas[0])
        if family == "S":
            big = s_state_gp(args.r, n, g, branch)
            single = lambda: s_state_subsystem_gp(args.r, g, branch)  # noqa: E731
        else:
            big = w_state_gp(n, args.k, g, branch)
            single = lambda: w_state_subsystem_gp(n, args.k, g, branch)  # noqa: E731
        try:
            subs = [single().value] * n
        except DegenerateSubsystem:
            subs = None
    else:
        if state is None:
            raise ValueError("per-site phases need an integer k or a state file")
        big = composite_gp(state, LocalLoop.from_phases(gammas), branch=branch)
        try:
            subs = [subsystem_gp(state, float(g), branch).value for g in gammas]
        except DegenerateSubsystem:
            subs = None

    out["composite_gp"] = big.value
    out["subsystem_gps"] = subs
    out["subsystem_degenerate"] = subs is None
    if subs is None:
        out["mutual_gp"] = None
    else:
        d = big.value - math.fsum(subs)
        out["mutual_gp"] = wrap(d) if branch == PRINCIPAL else d
    # loops built from parallel transport carry no dynamical phase
    out["dynamical_composite"] = 0.0
    out["dynamical_subsystems"] = [0.0] * n

    if family is not None and uniform:
        params = {"n": n, "r": args.r} if family == "S" else {"n": n, "k": args.k}
        out["e_r"] = er_s_state(args.r) if family == "S" else er_w_state(n, args.k)
        try:
            rep = attribute(family, params, float(gammas[0]))
            att = rep.to_dict()
            if subs is None:
                att["classical_contribution"] = None
                att["mutual_gp"] = None
            out["attribution"] = att
        except DegenerateSubsystem:
            out["attribution"] = None

    if args.oracle:
        out["oracle"] = _oracle(state, gammas, alphas, args, big, subs)
    return out


def _oracle(state, gammas, alphas, args, big: Angle, subs) -> dict:
    from .sim import dynamical_phase, pt_path_z, subsystem_gp_oracle, superpose, total_phase
    if state is None:
        raise ValueError("the oracle needs an integer k or a state file")
    n = state.n_qubits
    psi = superpose(state, max_qubits=args.max_qubits)
    rq = reduced_qubit(state)
    path = pt_path_z(n, alphas, n_steps=args.steps, reduced_states=[rq] * n)
    total = total_phase(psi, path).value
    res = {"steps": args.steps, "alphas": list(map(float, alphas)), "composite_gp": total,
           "composite_error": float(angular_distance(total, big.value))}
    if subs is not None:
        site = [subsystem_gp_oracle(psi, path, i).value for i in range(n)]
        res["subsystem_gps"] = site
        res["subsystem_error"] = float(np.max(angular_distance(site, subs)))
    delta, per_site = dynamical_phase(psi, path)
    res["dynamical_composite"] = delta
    res["dynamical_subsystems"] = per_site
    return res


def cmd_point(args) -> int:
    rep = point_report(args)
    with _open_out(args.out) as fh:
        fh.write(json.dumps(rep, indent=2) + "\n")
    return 0


def cmd_er(args) -> int:
    _need(args, "family")
    if args.family == "S":
        if args.e_r is not None:
            rec = {"family": "S", "e_r": args.e_r, "r": inverse_er_s(args.e_r)}
        else:
            _need(args, "r")
            rec = {"family": "S", "r": args.r, "e_r": er_s_state(args.r)}
    else:
        _need(args, "n", "k")
        rec = {"family": "W", "n": args.n, "k": args.k, "e_r": er_w_state(args.n, args.k)}
    with _open_out(args.out) as fh:
        fh.write(json.dumps(rec) + "\n")
    return 0


_COMMANDS = {"fig1": cmd_fig1, "verify": cmd_verify, "point": cmd_point, "er": cmd_er}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PhaseError, ValueError, OSError) as exc:
        sys.stderr.write(f"mutualgp {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

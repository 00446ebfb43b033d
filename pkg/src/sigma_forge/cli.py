"""Command-line front door.

Subcommands:

* ``classify``  - Sasakian / K-contact verdict for a right-hand side
* ``report``    - full geometric report document (JSON)
* ``flow``      - integrate the Hamiltonian flow, stream samples
* ``solve``     - integrate the underlying ODE as a curve in x

Exit codes: 0 success, 2 bad input (parse/usage), 3 an internal identity
suite failed (engine bug, surfaced loudly), 4 runtime blow-up with partial
output retained.  All output is deterministic for identical invocations.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .connection import (
    connection_forms,
    chern_trivial,
    normal_connection,
    verify_first_structure,
)
from .contact import classify, verify_contact_identities
from .dynamics import (
    IntegratorConfig,
    conservation_report,
    geodesic_residual,
    hamiltonian_frame_field,
    integrate_2graph,
    integrate_hamiltonian,
)
from .expr import ParseError, is_zero, parse, simplify, to_string
from .geometry import ETA, exterior_derivative, form_to_text, make_surface
from .hamiltonian import (
    PreconditionError,
    bihamiltonian_pair,
    jacobi_residual,
    omega1,
    poisson_one_form,
    reeb_bihamiltonian,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IDENTITY = 3
EXIT_BLOWUP = 4

_FMT = ".17g"


def _parse_expr(text: str, what: str):
    try:
        return parse(text)
    except ParseError as err:
        print(f"error: cannot parse {what}: {err}", file=sys.stderr)
        raise


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("expected three comma-separated coordinates")
    return tuple(float(v) for v in parts)


def _json_dumps(doc) -> str:
    return json.dumps(doc, indent=2)


def cmd_classify(args) -> int:
    try:
        f = _parse_expr(args.f, "--f")
    except ParseError:
        return EXIT_INPUT
    s = make_surface(f)
    verdict = classify(s)
    print(_json_dumps(verdict.to_json()))
    return EXIT_OK


def _bihamiltonian_section(s) -> dict:
    if not is_zero(s.fy):
        return {"applicable": False, "reason": "not Sasakian (f_y != 0)"}
    try:
        pair = bihamiltonian_pair(s, s.f)
    except PreconditionError as err:
        return {"applicable": False, "reason": str(err)}
    doc = {"applicable": True, "hamiltonian_is_f": True}
    doc.update(pair.to_json())
    return doc


def _heisenberg_section(s) -> dict:
    flag = is_zero(s.fp) and is_zero(s.fy)
    doc: dict = {"is_heisenberg": flag}
    if not flag:
        return doc
    doc["structure_constants"] = {
        "d_eta1": form_to_text(exterior_derivative(s, ETA[0])),
        "d_eta2": form_to_text(exterior_derivative(s, ETA[1])),
        "d_eta3": form_to_text(exterior_derivative(s, ETA[2])),
    }
    try:
        doc["reeb_bihamiltonian"] = reeb_bihamiltonian(s).to_json()
    except PreconditionError as err:
        doc["reeb_bihamiltonian"] = {"applicable": False, "reason": str(err)}
    return doc


def build_report(f_text: str) -> tuple[dict, bool]:
    """The full report document and whether every identity suite passed."""
    f = parse(f_text)
    s = make_surface(f)
    forms = connection_forms(s)
    first_structure = verify_first_structure(s)
    contact_identities = verify_contact_identities(s)
    nb = normal_connection(s)
    chern = chern_trivial(s)
    eta3 = poisson_one_form(s, omega1(s))
    verdict = classify(s)

    doc = {
        "tool": "sigma-forge",
        "version": __version__,
        "input": {"f": f_text, "canonical": to_string(simplify(f))},
        "classification": verdict.to_json(),
        "structure_equations": {
            "d_eta1": form_to_text(exterior_derivative(s, ETA[0])),
            "d_eta2": form_to_text(exterior_derivative(s, ETA[1])),
            "d_eta3": form_to_text(exterior_derivative(s, ETA[2])),
        },
        "connection_forms": {
            "alpha": form_to_text(forms.alpha),
            "beta": form_to_text(forms.beta),
            "delta": form_to_text(forms.delta),
        },
        "first_structure_residuals": first_structure.to_json(),
        "contact_identities": contact_identities.to_json(),
        "poisson": {
            "one_form": form_to_text(eta3),
            "jacobi_residual": to_string(jacobi_residual(s, eta3)),
            "is_poisson": verdict.is_sasakian,
        },
        "bihamiltonian": _bihamiltonian_section(s),
        "heisenberg": _heisenberg_section(s),
        "normal_bundle": {
            "omega12": form_to_text(nb.omega12),
            "curvature": form_to_text(nb.curvature),
            "closed_form": form_to_text(nb.closed_form),
            "matches_closed_form": nb.matches_closed_form,
            "in_sasakian_hypothesis": nb.in_sasakian_hypothesis,
        },
        "chern": chern.to_json(),
    }
    ok = first_structure.all_zero and contact_identities.all_zero
    if is_zero(s.fy) and not nb.matches_closed_form:
        ok = False
    return doc, ok


def cmd_report(args) -> int:
    try:
        doc, ok = build_report(args.f)
    except ParseError as err:
        print(f"error: cannot parse --f: {err}", file=sys.stderr)
        return EXIT_INPUT
    text = _json_dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if not ok:
        print("error: an internal identity suite failed", file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


def _emit_trajectory(traj, summary: dict, fmt: str) -> None:
    if fmt == "json":
        doc = traj.to_json()
        doc["summary"] = summary
        print(_json_dumps(doc))
    else:
        sys.stdout.write(traj.to_csv())
        pieces = " ".join(f"{k}={v}" for k, v in summary.items())
        print(f"# {pieces}")


def cmd_flow(args) -> int:
    try:
        f = _parse_expr(args.f, "--f")
        H = _parse_expr(args.H, "--H")
    except ParseError:
        return EXIT_INPUT
    try:
        q0 = _parse_point(args.q0)
    except ValueError as err:
        print(f"error: bad --q0: {err}", file=sys.stderr)
        return EXIT_INPUT
    if args.t <= 0 or args.dt <= 0:
        print("error: --t and --dt must be positive", file=sys.stderr)
        return EXIT_INPUT

    s = make_surface(f)
    cfg = IntegratorConfig(method="rk4", dt=args.dt, t_end=args.t)
    traj = integrate_hamiltonian(s, H, q0, cfg)
    residual = geodesic_residual(s, hamiltonian_frame_field(s, H), traj)
    traj.add_monitor("geodesic_residual", residual)
    drift = conservation_report(traj)
    summary = {
        "status": traj.status,
        "max_H_drift": format(drift.max_drift, _FMT),
        "max_geodesic_residual": format(float(np.nanmax(residual)), _FMT),
    }
    _emit_trajectory(traj, summary, args.format)
    return EXIT_OK if traj.status == "completed" else EXIT_BLOWUP


def cmd_solve(args) -> int:
    try:
        f = _parse_expr(args.f, "--f")
    except ParseError:
        return EXIT_INPUT
    try:
        q0 = _parse_point(args.q0)
    except ValueError as err:
        print(f"error: bad --q0: {err}", file=sys.stderr)
        return EXIT_INPUT
    if args.to <= q0[0]:
        print("error: --to must lie beyond the initial x", file=sys.stderr)
        return EXIT_INPUT
    if args.dt <= 0:
        print("error: --dt must be positive", file=sys.stderr)
        return EXIT_INPUT

    s = make_surface(f)
    cfg = IntegratorConfig(method="rk4", dt=args.dt, t_end=args.to)
    traj = integrate_2graph(s, q0[0], q0[1], q0[2], cfg)
    summary = {
        "status": traj.status,
        "max_pullback_dy": format(float(np.max(traj.monitors["pullback_dy"])), _FMT),
        "max_pullback_dp": format(float(np.max(traj.monitors["pullback_dp"])), _FMT),
    }
    _emit_trajectory(traj, summary, args.format)
    return EXIT_OK if traj.status == "completed" else EXIT_BLOWUP


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigma-forge",
        description="contact geometry, Poisson structures and flows of y'' = f(x, y, y')",
    )
    parser.add_argument("--version", action="version", version=f"sigma-forge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Sasakian / K-contact verdict")
    p.add_argument("--f", required=True, help="right-hand side f(x, y, p)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="full geometric report (JSON)")
    p.add_argument("--f", required=True, help="right-hand side f(x, y, p)")
    p.add_argument("--out", help="write the document to a file instead of stdout")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("flow", help="integrate the Hamiltonian flow")
    p.add_argument("--f", required=True, help="right-hand side f(x, y, p)")
    p.add_argument("--H", required=True, help="Hamiltonian H(x, y, p)")
    p.add_argument("--q0", required=True, help="initial point x,y,p")
    p.add_argument("--t", required=True, type=float, help="final time (positive)")
    p.add_argument("--dt", type=float, default=1e-3, help="fixed RK4 step (default 1e-3)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("solve", help="integrate y'' = f as a curve in x")
    p.add_argument("--f", required=True, help="right-hand side f(x, y, p)")
    p.add_argument("--q0", required=True, help="initial point x0,y0,p0")
    p.add_argument("--to", required=True, type=float, help="final x")
    p.add_argument("--dt", type=float, default=1e-3, help="fixed RK4 step (default 1e-3)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_solve)

    return parser


_VALUE_FLAGS = ("--f", "--H", "--q0", "--t", "--dt", "--to", "--out", "--format")


def _normalize(argv: list[str]) -> list[str]:
    """Fuse ``--flag value`` into ``--flag=value`` so expressions starting
    with a minus sign (e.g. --f -y) survive argparse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_normalize(list(argv)))
    except SystemExit as exc:
        # argparse uses 2 for usage errors and 0 for --help/--version
        return int(exc.code or 0)
    return args.func(args)


def run() -> None:
    sys.exit(main())

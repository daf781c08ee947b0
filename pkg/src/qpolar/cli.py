"""Command-line front end: ``qpolar <command> --input STATE.json``.

Every command prints a report in ``--format json`` (default) or ``text``.
JSON floats carry 17 significant digits so identical inputs give
byte-identical output. Exit status is 0 on success (an undefined degree of
polarization included), 2 on invalid input and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .errors import NumericalError, QPolarError, ValidationError
from .fock import PureState, validate
from .majorana import Constellation, max_fidelity_su2, single_block, state_to_constellation
from .polarization import (
    STRATEGIES,
    FeasibilityReport,
    StokesVector,
    classify_perfect,
    counterexample_analysis,
    decompose,
    per_subspace,
    stokes_vector,
)
from .statefile import dumps, load_state, write_state
from .su2 import Rotation, apply_rotation

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _undef(x):
    return "undefined" if x is None else x


def _angles(d):
    return None if d is None else {"theta": d[0], "phi": d[1]}


def _stokes_obj(sv: StokesVector) -> dict:
    # a rounding-level 3-vector has no meaningful direction
    noise = sv.magnitude <= 1e-12 * max(sv.s0, 1.0)
    return {
        "s0": sv.s0,
        "s1": sv.vector[0],
        "s2": sv.vector[1],
        "s3": sv.vector[2],
        "magnitude": sv.magnitude,
        "p": _undef(sv.p),
        "direction": None if noise else _angles(sv.direction),
    }


def _point(vec, scale, radius) -> dict:
    """Coordinates vec / scale inside the unit ball (length = degree of
    polarization) plus the radius of the nested sphere to draw them on."""
    u = np.asarray(vec, dtype=float) / scale
    return {"x": u[0], "y": u[1], "z": u[2], "radius": radius}


def _star_list(c: Constellation) -> list:
    out = []
    for (theta, phi), u in zip(c.points, c.unit_vectors()):
        out.append({"theta": theta, "phi": phi, "x": u[0], "y": u[1], "z": u[2], "radius": c.n_photons})
    return out


def _state_kind(state) -> str:
    return "pure" if isinstance(state, PureState) else "mixed"


def cmd_stokes(args) -> dict:
    state = load_state(args.input)
    sv = stokes_vector(state)
    out = {"command": "stokes", "state_kind": _state_kind(state), "nmax": state.basis.nmax, **_stokes_obj(sv)}
    out["poincare"] = [] if sv.p is None else [_point(sv.vector, sv.s0, 1)]
    if isinstance(state, PureState):
        sub = per_subspace(state, atol=1e-30)
        out["subspaces"] = [
            {"n": e.n, "q": e.q, "s1": e.vector[0], "s2": e.vector[1], "s3": e.vector[2],
             "point": _point(e.vector, e.n, e.n) if e.n > 0 else None}
            for e in sub.entries
        ]
    return out


def cmd_classify(args) -> dict:
    state = load_state(args.input)
    tol = 1e-9 if args.tol is None else args.tol
    r = classify_perfect(state, tol=tol)
    return {
        "command": "classify",
        "state_kind": _state_kind(state),
        "tol": tol,
        "s0": r.s0,
        "p": _undef(r.p),
        "is_perfect": r.is_perfect,
        "table_row": r.table_row.value,
        "aligned_direction": _angles(r.aligned_direction),
        "residual_b_occupation": r.residual_b_occupation,
    }


def cmd_decompose(args) -> dict:
    state = load_state(args.input)
    tol = 1e-12 if args.tol is None else args.tol
    res = decompose(state, strategy=args.strategy, fixed_n=args.fixed_n, tol=tol)
    rho = state.to_density_matrix() if isinstance(state, PureState) else state
    out = {
        "command": "decompose",
        "requested_strategy": args.strategy,
        "strategy": res.strategy,
        "p": res.p,
        "direction": _angles(res.direction),
        "reconstruction_error": float(np.max(np.abs(res.reconstruct() - rho.matrix))),
        "polarized": None,
        "unpolarized": None,
        "min_eigenvalue_unpolarized": res.min_eigenvalue_unpolarized,
        "physical": res.physical,
        "files": [],
    }
    for key, comp in (("polarized", res.polarized), ("unpolarized", res.unpolarized)):
        if comp is None:
            continue
        out[key] = _stokes_obj(stokes_vector(comp))
        if args.output:
            path = f"{args.output}.{key}.json"
            write_state(comp, path)
            out["files"].append(path)
    return out


def cmd_constellation(args) -> dict:
    state = load_state(args.input)
    if not isinstance(state, PureState):
        raise ValidationError("constellations need a pure state")
    N, _ = single_block(state, args.block)
    c = state_to_constellation(state, args.block)
    out = {
        "command": "constellation",
        "n": N,
        "stars": _star_list(c),
        "max_root_residual": max(c.root_residuals, default=0.0),
        "min_separation": c.min_separation() if N > 1 else None,
        "frames": [],
    }
    if args.frames:
        theta = args.theta if args.theta is not None else 0.5 * math.pi
        phi = args.phi if args.phi is not None else 0.0
        out["rotation"] = {"theta": theta, "phi": phi}
        for k in range(args.frames + 1):
            rot = Rotation(theta * k / args.frames, phi)
            rotated = apply_rotation(rot, state)
            out["frames"].append({"step": k, "theta": rot.theta, "phi": rot.phi,
                                  "stars": _star_list(state_to_constellation(rotated, N))})
    return out


def cmd_fidelity(args) -> dict:
    state = load_state(args.input)
    if not isinstance(state, PureState):
        raise ValidationError("the fidelity search needs a pure state")
    N, _ = single_block(state, args.block)
    r = max_fidelity_su2(state, args.block)
    return {
        "command": "fidelity",
        "n": N,
        "fidelity": r.fidelity,
        "theta": r.theta,
        "phi": r.phi,
        "lower_bound": 1.0 / math.sqrt(N + 1),
        "gradient_norm": r.gradient_norm,
        "iterations": r.iterations,
    }


def cmd_rotate(args) -> dict:
    if args.theta is None or args.phi is None:
        raise ValidationError("rotate needs --theta and --phi")
    state = load_state(args.input)
    rot = Rotation(args.theta, args.phi)
    rotated = apply_rotation(rot, state, method=args.method)
    before, after = stokes_vector(state), stokes_vector(rotated)
    predicted = rot.so3() @ np.asarray(before.vector)
    out = {
        "command": "rotate",
        "method": args.method,
        "rotation": {"theta": rot.theta, "phi": rot.phi},
        "before": _stokes_obj(before),
        "after": _stokes_obj(after),
        "so3_prediction_error": float(np.max(np.abs(predicted - np.asarray(after.vector)))),
        "validation_ok": validate(rotated).ok,
        "files": [],
    }
    if args.output:
        write_state(rotated, args.output)
        out["files"].append(args.output)
    return out


def _feasibility_obj(r: FeasibilityReport) -> dict:
    return {
        "status": r.status,
        "direction": _angles(r.direction),
        "omega_photon_numbers": list(r.omega_photon_numbers),
        "omega_coefficients": list(r.omega_coefficients),
        "overlap": None if r.overlap is None else list(r.overlap),
        "coplanarity_residual": r.coplanarity_residual,
        "coplanarity_normalized": r.coplanarity_normalized,
        "min_p_remainder": r.min_p_remainder,
        "best_weights": list(r.best_weights),
        "notes": list(r.notes),
    }


def cmd_appendix_b(args) -> dict:
    a = counterexample_analysis(args.n)
    ref = a.reference_frame
    return {
        "command": "appendix-b",
        "n": a.n,
        "state": f"(|0,{a.n}> + |{a.n - 1},1>)/sqrt(2)",
        "stokes": _stokes_obj(a.stokes),
        "verdict": ref.status,
        "reference_frame": _feasibility_obj(ref),
        "stokes_frame": _feasibility_obj(a.stokes_frame),
        "caveats": list(a.caveats),
    }


def _text(obj, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            lines += _text(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)) and obj and any(isinstance(v, (dict, list, tuple)) for v in obj):
        for i, v in enumerate(obj):
            lines += _text(v, f"{prefix}[{i}]")
    else:
        lines.append(f"{prefix}: {_text_scalar(obj)}")
    return lines


def _text_scalar(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text_scalar(x) for x in v) + "]"
    if isinstance(v, (bool, np.bool_)) or v is None:
        return str(v).lower() if v is not None else "null"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.12g}{v.imag:+.12g}i"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpolar", description="Polarization analysis of two-mode quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, needs_input=True):
        p = sub.add_parser(name, help=help_)
        if needs_input:
            p.add_argument("--input", required=True, metavar="PATH", help="JSON state file")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--tol", type=float, default=None, metavar="FLOAT")
        p.set_defaults(func=func)
        return p

    add("stokes", cmd_stokes, "Stokes parameters and degree of polarization")
    add("classify", cmd_classify, "perfect-polarization test and classification")
    p = add("decompose", cmd_decompose, "split into polarized and unpolarized parts")
    p.add_argument("--strategy", choices=STRATEGIES, default="bracketed")
    p.add_argument("--fixed-n", type=int, default=None, metavar="INT")
    p.add_argument("--output", default=None, metavar="PATH",
                   help="prefix for PATH.polarized.json and PATH.unpolarized.json")
    p = add("constellation", cmd_constellation, "Majorana stars of one photon-number block")
    p.add_argument("--block", type=int, default=None, metavar="INT")
    p.add_argument("--frames", type=int, default=0, metavar="INT", help="rotation animation steps")
    p.add_argument("--theta", type=float, default=None, metavar="FLOAT")
    p.add_argument("--phi", type=float, default=None, metavar="FLOAT")
    p = add("fidelity", cmd_fidelity, "largest overlap with an SU(2) coherent state")
    p.add_argument("--block", type=int, default=None, metavar="INT")
    p = add("rotate", cmd_rotate, "apply the polarization rotation R(theta, phi)")
    p.add_argument("--theta", type=float, default=None, metavar="FLOAT")
    p.add_argument("--phi", type=float, default=None, metavar="FLOAT")
    p.add_argument("--method", choices=("exp", "gauss"), default="exp")
    p.add_argument("--output", default=None, metavar="PATH", help="write the rotated state here")
    p = add("appendix-b", cmd_appendix_b, "polarized/unpolarized split test for (|0,N>+|N-1,1>)/sqrt(2)",
            needs_input=False)
    p.add_argument("--n", type=int, default=3, metavar="N")
    return parser


def _emit(obj, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(dumps(obj) + "\n")
    else:
        stream.write("\n".join(_text(obj)) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (ValidationError, NumericalError, QPolarError) as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_VALIDATION
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_status": code}}
        if args.format == "json":
            _emit(err, "json", sys.stdout)
        else:
            sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return code
    _emit(report, args.format, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

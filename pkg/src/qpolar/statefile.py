"""JSON state files and deterministic JSON output.

State files index amplitudes and matrix elements by explicit (m, n) labels::

    {"nmax": 2, "kind": "pure",
     "amplitudes": [{"m": 1, "n": 0, "re": 0.7071, "im": 0.0}, ...]}
    {"nmax": 1, "kind": "mixed",
     "entries": [{"row": [1, 0], "col": [1, 0], "re": 0.5, "im": 0.0}, ...]}
    {"nmax": 4, "kind": "su2-coherent", "n": 2, "theta": 1.57, "phi": 0.0}
    {"nmax": 4, "kind": "perfect-spec", "theta": 0.0, "phi": 0.0,
     "weights": [{"n": 1, "q": 0.5, "varphi": 0.0}, ...]}

Mixed-state entries missing their transposed partner get the complex
conjugate filled in, so listing one triangle is enough. A mixed file may
carry ``"positive": false`` to skip the positivity check; decomposition
output uses it for an unpolarized part with negative eigenvalues, which
must still load (and then fail :func:`qpolar.fock.validate`).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .fock import DensityMatrix, PureState, TwoModeBasis, validate
from .su2 import PolarizedPureSpec, polarized_pure_state, su2_coherent

KINDS = ("pure", "mixed", "su2-coherent", "perfect-spec")


class StateFileError(ValidationError):
    pass


def _require(obj: dict, key: str):
    if key not in obj:
        raise StateFileError(f"state file is missing {key!r}")
    return obj[key]


def _label(x) -> tuple[int, int]:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise StateFileError(f"expected an [m, n] pair, got {x!r}")
    return int(x[0]), int(x[1])


def parse_state(obj: dict):
    """Build a PureState or DensityMatrix from a decoded state-file object."""
    try:
        return _parse(obj)
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"malformed state file: {type(exc).__name__}: {exc}") from None


def _parse(obj: dict):
    if not isinstance(obj, dict):
        raise StateFileError("state file must hold a JSON object")
    nmax = _require(obj, "nmax")
    if not isinstance(nmax, int) or nmax < 0:
        raise StateFileError(f"nmax must be a non-negative integer, got {nmax!r}")
    basis = TwoModeBasis(nmax)
    kind = _require(obj, "kind")

    if kind == "pure":
        amps = np.zeros(basis.dim, dtype=complex)
        for a in _require(obj, "amplitudes"):
            amps[basis.index(int(a["m"]), int(a["n"]))] += complex(a.get("re", 0.0), a.get("im", 0.0))
        return PureState(basis, amps)

    if kind == "mixed":
        given = {}
        for e in _require(obj, "entries"):
            i = basis.index(*_label(e["row"]))
            j = basis.index(*_label(e["col"]))
            if (i, j) in given:
                raise StateFileError(f"duplicate entry row={e['row']} col={e['col']}")
            given[(i, j)] = complex(e.get("re", 0.0), e.get("im", 0.0))
        rho = np.zeros((basis.dim, basis.dim), dtype=complex)
        for (i, j), v in given.items():
            rho[i, j] = v
            if (j, i) not in given:
                rho[j, i] = np.conj(v)
        return DensityMatrix(basis, rho, check_positive=bool(obj.get("positive", True)))

    if kind == "su2-coherent":
        return su2_coherent(int(_require(obj, "n")), float(_require(obj, "theta")), float(_require(obj, "phi")), basis)

    if kind == "perfect-spec":
        weights = tuple((int(w["n"]), float(w["q"]), float(w.get("varphi", 0.0))) for w in _require(obj, "weights"))
        spec = PolarizedPureSpec(float(_require(obj, "theta")), float(_require(obj, "phi")), weights)
        return polarized_pure_state(spec, basis)

    raise StateFileError(f"unknown state kind {kind!r}; expected one of {KINDS}")


def load_state(path: str | Path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return parse_state(obj)


def state_to_obj(state, drop_below: float = 0.0) -> dict:
    basis = state.basis
    if isinstance(state, PureState):
        amps = [
            {"m": m, "n": n, "re": float(c.real), "im": float(c.imag)}
            for (m, n), c in zip(basis.labels, state.amplitudes)
            if abs(c) > drop_below
        ]
        return {"nmax": basis.nmax, "kind": "pure", "amplitudes": amps}
    entries = []
    for i in range(basis.dim):
        for j in range(i, basis.dim):
            v = state.matrix[i, j]
            if abs(v) > drop_below:
                entries.append({"row": list(basis.labels[i]), "col": list(basis.labels[j]),
                                "re": float(v.real), "im": float(v.imag)})
    out = {"nmax": basis.nmax, "kind": "mixed", "entries": entries}
    if not validate(state).ok:
        out["positive"] = False
    return out


def write_state(state, path: str | Path) -> None:
    Path(path).write_text(dumps(state_to_obj(state)) + "\n")


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot encode non-finite float {x!r}")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats pinned to 17 significant digits and stable key order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")

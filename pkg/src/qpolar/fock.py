"""Truncated two-mode Fock space.

Kets |m, n> (m photons in mode a, n in mode b) with total photon number
N = m + n <= nmax are laid out in contiguous blocks of increasing N, and
inside a block by increasing m::

    index(m, n) = N (N + 1) / 2 + m

All matrices are dense. The Stokes operators never leave a block, so every
polarization quantity is exact on the truncated space; only the bare
creation operators feel the cutoff (in the top block).
"""

from __future__ import annotations

from dataclasses import dataclass, field, InitVar
from functools import cached_property, lru_cache
from typing import Union

import numpy as np

from .errors import BasisMismatchError, CutoffExceededError, InvalidStateError, ValidationError
from .tolerance import current as _tol


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class TwoModeBasis:
    nmax: int

    def __post_init__(self):
        if int(self.nmax) != self.nmax or self.nmax < 0:
            raise ValidationError(f"nmax must be a non-negative integer, got {self.nmax!r}")
        object.__setattr__(self, "nmax", int(self.nmax))

    @property
    def dim(self) -> int:
        return (self.nmax + 1) * (self.nmax + 2) // 2

    def index(self, m: int, n: int) -> int:
        if m < 0 or n < 0:
            raise CutoffExceededError(f"photon counts must be non-negative, got ({m}, {n})")
        N = m + n
        if N > self.nmax:
            raise CutoffExceededError(f"|{m},{n}> has N={N} > nmax={self.nmax}")
        return N * (N + 1) // 2 + m

    def label(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.dim:
            raise CutoffExceededError(f"index {index} outside basis of dimension {self.dim}")
        N = int((np.sqrt(8 * index + 1) - 1) // 2)
        # guard the float sqrt at block edges
        while N * (N + 1) // 2 > index:
            N -= 1
        while (N + 1) * (N + 2) // 2 <= index:
            N += 1
        m = index - N * (N + 1) // 2
        return m, N - m

    @cached_property
    def labels(self) -> tuple[tuple[int, int], ...]:
        return tuple((m, N - m) for N in range(self.nmax + 1) for m in range(N + 1))

    @cached_property
    def photon_numbers(self) -> np.ndarray:
        """Total photon number of every basis ket, in flat order."""
        return _frozen([m + n for m, n in self.labels])

    def block(self, N: int) -> slice:
        if not 0 <= N <= self.nmax:
            raise CutoffExceededError(f"block N={N} outside 0..{self.nmax}")
        start = N * (N + 1) // 2
        return slice(start, start + N + 1)

    def blocks(self):
        """Yield ``(N, slice)`` for every block."""
        for N in range(self.nmax + 1):
            yield N, self.block(N)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a :class:`TwoModeBasis`."""

    basis: TwoModeBasis
    amplitudes: np.ndarray
    normalize: InitVar[bool] = True

    def __post_init__(self, normalize):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.basis.dim,):
            raise BasisMismatchError(
                f"amplitude vector has length {amps.size}, basis dimension is {self.basis.dim}"
            )
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidStateError("state vector is zero or not finite")
        if normalize:
            amps = amps / norm
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_components(cls, basis: TwoModeBasis, components: dict) -> "PureState":
        """Build from ``{(m, n): amplitude}``."""
        amps = np.zeros(basis.dim, dtype=complex)
        for (m, n), c in components.items():
            amps[basis.index(m, n)] += c
        return cls(basis, amps)

    def block_populations(self) -> np.ndarray:
        return np.array([np.sum(np.abs(self.amplitudes[s]) ** 2) for _, s in self.basis.blocks()])

    def support(self, atol: float = 1e-14) -> list[int]:
        """Photon numbers N whose block carries weight above ``atol``."""
        return [N for N, q in enumerate(self.block_populations()) if q > atol]

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian unit-trace matrix. Positivity is enforced unless ``check_positive=False``."""

    basis: TwoModeBasis
    matrix: np.ndarray
    check_positive: InitVar[bool] = True

    def __post_init__(self, check_positive):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (self.basis.dim, self.basis.dim):
            raise BasisMismatchError(f"matrix shape {rho.shape} does not match basis dimension {self.basis.dim}")
        tol = _tol()
        herm = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
        if herm > tol.hermitian:
            raise InvalidStateError(f"matrix is not Hermitian (residual {herm:.3e})")
        tr = np.trace(rho).real
        if abs(tr - 1) > tol.trace:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        if check_positive:
            lo = np.linalg.eigvalsh(rho)[0]
            if lo < tol.positivity:
                raise InvalidStateError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "matrix", _frozen(rho))

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    def block_populations(self) -> np.ndarray:
        d = np.real(np.diag(self.matrix))
        return np.array([np.sum(d[s]) for _, s in self.basis.blocks()])

    def support(self, atol: float = 1e-14) -> list[int]:
        return [N for N, q in enumerate(self.block_populations()) if q > atol]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    basis: TwoModeBasis
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        op = np.asarray(self.matrix, dtype=complex)
        if op.shape != (self.basis.dim, self.basis.dim):
            raise BasisMismatchError(f"operator shape {op.shape} does not match basis dimension {self.basis.dim}")
        if self.hermitian:
            res = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
            if res > _tol().hermitian:
                raise ValueError(f"operator flagged Hermitian but residual is {res:.3e}")
        object.__setattr__(self, "matrix", _frozen(op))

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_basis(self.basis, other.basis)
        return OperatorMatrix(self.basis, self.matrix @ other.matrix)

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.matrix.conj().T, self.hermitian)


State = Union[PureState, DensityMatrix]


def _same_basis(a: TwoModeBasis, b: TwoModeBasis) -> None:
    if a != b:
        raise BasisMismatchError(f"basis mismatch: nmax={a.nmax} vs nmax={b.nmax}")


def basis_index(m: int, n: int, basis: TwoModeBasis) -> int:
    return basis.index(m, n)


def basis_label(index: int, basis: TwoModeBasis) -> tuple[int, int]:
    return basis.label(index)


@lru_cache(maxsize=64)
def _ladder(nmax: int):
    basis = TwoModeBasis(nmax)
    a = np.zeros((basis.dim, basis.dim))
    b = np.zeros((basis.dim, basis.dim))
    for j, (m, n) in enumerate(basis.labels):
        if m > 0:
            a[basis.index(m - 1, n), j] = np.sqrt(m)
        if n > 0:
            b[basis.index(m, n - 1), j] = np.sqrt(n)
    return {
        "a": OperatorMatrix(basis, a),
        "a_dag": OperatorMatrix(basis, a.T),
        "b": OperatorMatrix(basis, b),
        "b_dag": OperatorMatrix(basis, b.T),
    }


def ladder_operators(basis: TwoModeBasis) -> dict[str, OperatorMatrix]:
    """Annihilation/creation operators ``a, a_dag, b, b_dag``.

    Creation operators drop transitions out of the top block, so
    ``[a, a_dag] = 1`` holds only on N <= nmax - 1.
    """
    return dict(_ladder(basis.nmax))


@lru_cache(maxsize=64)
def _stokes(nmax: int):
    # Built elementwise rather than from ladder products: sqrt(n)^2 != n in
    # floating point, and the number operators must be exact integers.
    basis = TwoModeBasis(nmax)
    na = np.diag([float(m) for m, _ in basis.labels])
    nb = np.diag([float(n) for _, n in basis.labels])
    ab = np.zeros((basis.dim, basis.dim))  # a^dag b never crosses the cutoff
    for j, (m, n) in enumerate(basis.labels):
        if n > 0:
            ab[basis.index(m + 1, n - 1), j] = np.sqrt((m + 1) * n)
    ba = ab.T
    mats = (na + nb, na - nb, ab + ba, -1j * (ab - ba))
    return tuple(OperatorMatrix(basis, m, hermitian=True) for m in mats)


def stokes_operators(basis: TwoModeBasis) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """``(S0, S1, S2, S3)`` with S1 = a^dag a - b^dag b, S2 = a^dag b + b^dag a,
    S3 = -i (a^dag b - b^dag a)."""
    return _stokes(basis.nmax)


def number_operator_b(basis: TwoModeBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, np.diag([float(n) for _, n in basis.labels]), hermitian=True)


def expectation(op: OperatorMatrix, state: State) -> complex:
    _same_basis(op.basis, state.basis)
    if isinstance(state, PureState):
        psi = state.amplitudes
        return complex(np.vdot(psi, op.matrix @ psi))
    return complex(np.einsum("ij,ji->", op.matrix, state.matrix))


def expectation_real(op: OperatorMatrix, state: State) -> float:
    """Real part of :func:`expectation`; a large imaginary part signals misuse."""
    val = expectation(op, state)
    if abs(val.imag) > _tol().imag * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; is the operator Hermitian?")
    return val.real


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    norm_residual: float | None = None
    hermiticity_residual: float | None = None
    trace_residual: float | None = None
    min_eigenvalue: float | None = None
    purity: float | None = None
    problems: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.problems


def validate(state) -> ValidationReport:
    """Report the residual of every state invariant without raising.

    Accepts a :class:`PureState`, a :class:`DensityMatrix`, or a raw
    (vector or square) array.
    """
    tol = _tol()
    if isinstance(state, PureState):
        arr = state.amplitudes
    elif isinstance(state, DensityMatrix):
        arr = state.matrix
    else:
        arr = np.asarray(state, dtype=complex)

    if arr.ndim == 1:
        norm_res = abs(np.linalg.norm(arr) - 1.0)
        problems = ("norm",) if norm_res > tol.norm else ()
        return ValidationReport("pure", norm_residual=float(norm_res), min_eigenvalue=0.0, purity=1.0,
                                problems=problems)

    herm = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    tr_res = float(abs(np.trace(arr) - 1.0))
    sym = 0.5 * (arr + arr.conj().T)
    lo = float(np.linalg.eigvalsh(sym)[0])
    purity = float(np.real(np.einsum("ij,ji->", sym, sym)))
    problems = []
    if herm > tol.hermitian:
        problems.append("hermiticity")
    if tr_res > tol.trace:
        problems.append("trace")
    if lo < tol.positivity:
        problems.append("positivity")
    return ValidationReport("mixed", hermiticity_residual=herm, trace_residual=tr_res, min_eigenvalue=lo,
                            purity=purity, problems=tuple(problems))

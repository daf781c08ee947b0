"""Stokes vectors, degree of polarization, and perfect-polarization structure.

Perfectly polarized states are exactly those of the form

    rho = sum_{N,N'} sigma_{N,N'} |theta phi^(N)><theta phi^(N')|

for a positive semidefinite, unit-trace sigma: a rotated state of mode a with
mode b in vacuum. Any other state with S != 0 splits as
rho = (1 - p) rho_A + p rho_B with rho_B perfectly polarized along S and
rho_A carrying a zero Stokes 3-vector; the split is not unique unless the
photon number of rho_B is pinned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.optimize
from scipy.special import gammaln, logsumexp

from .errors import (
    CutoffExceededError,
    InconsistentStrategyError,
    NumericalError,
    UndefinedPolarizationError,
    ValidationError,
)
from .fock import (
    DensityMatrix,
    PureState,
    State,
    TwoModeBasis,
    expectation,
    number_operator_b,
    stokes_operators,
)
from .su2 import Rotation, apply_rotation, coherent_amplitudes, direction_angles, su2_coherent, unit_vector
from .tolerance import tolerances

S0_FLOOR = 1e-12


@dataclass(frozen=True)
class StokesVector:
    s0: float
    vector: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "s0", float(self.s0))
        object.__setattr__(self, "vector", tuple(float(x) for x in self.vector))

    @property
    def magnitude(self) -> float:
        return math.sqrt(sum(x * x for x in self.vector))

    @property
    def p(self) -> float | None:
        """Degree of polarization, or None when S0 vanishes (the two-mode vacuum)."""
        if self.s0 <= S0_FLOOR:
            return None
        return self.magnitude / self.s0

    @property
    def direction(self) -> tuple[float, float] | None:
        if self.magnitude == 0:
            return None
        return direction_angles(self.vector)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.s0, *self.vector)


def classical_stokes(alpha: complex, beta: complex) -> StokesVector:
    """Stokes parameters of a plane wave with complex mode amplitudes (alpha, beta)."""
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0 and beta == 0:
        raise UndefinedPolarizationError("zero field has no polarization")
    cross = alpha.conjugate() * beta
    return StokesVector(abs(alpha) ** 2 + abs(beta) ** 2, (abs(alpha) ** 2 - abs(beta) ** 2, 2 * cross.real, 2 * cross.imag))


def classical_decompose(s: StokesVector) -> tuple[StokesVector, StokesVector]:
    """Split into a fully polarized and a fully unpolarized beam."""
    if s.s0 <= 0:
        raise UndefinedPolarizationError("S0 must be positive")
    mag = s.magnitude
    return StokesVector(mag, s.vector), StokesVector(s.s0 - mag, (0.0, 0.0, 0.0))


def stokes_vector(state: State) -> StokesVector:
    vals = [expectation(op, state).real for op in stokes_operators(state.basis)]
    return StokesVector(vals[0], tuple(vals[1:]))


def degree_of_polarization(state: State) -> float | None:
    """|S| / S0; None for the two-mode vacuum, where it is undefined."""
    return stokes_vector(state).p


@dataclass(frozen=True)
class SubspaceEntry:
    n: int
    q: float
    vector: tuple[float, float, float]


@dataclass(frozen=True)
class SubspaceStokes:
    entries: tuple[SubspaceEntry, ...]


def per_subspace(state: PureState, atol: float = 0.0) -> SubspaceStokes:
    """Block populations q_N and Stokes vectors of each normalized N-block."""
    basis = state.basis
    ops = stokes_operators(basis)
    entries = []
    for N, s in basis.blocks():
        c = state.amplitudes[s]
        q = float(np.vdot(c, c).real)
        if q <= atol:
            continue
        vec = tuple(float(np.vdot(c, op.matrix[s, s] @ c).real / q) for op in ops[1:])
        entries.append(SubspaceEntry(N, q, vec))
    return SubspaceStokes(tuple(entries))


def p_from_subspaces(sub: SubspaceStokes) -> float | None:
    """|sum_N q_N S^(N)| / sum_N q_N N."""
    total = sum(e.q * e.n for e in sub.entries)
    if total <= S0_FLOOR:
        return None
    vec = np.sum([np.multiply(e.q, e.vector) for e in sub.entries], axis=0)
    return float(np.linalg.norm(vec) / total)


def _check_sigma(sigma: np.ndarray, require_unit_trace: bool) -> np.ndarray:
    sigma = np.atleast_2d(np.asarray(sigma, dtype=complex))
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValidationError(f"sigma must be square, got shape {sigma.shape}")
    if np.max(np.abs(sigma - sigma.conj().T)) > 1e-12:
        raise ValidationError("sigma is not Hermitian")
    sigma = 0.5 * (sigma + sigma.conj().T)
    if np.linalg.eigvalsh(sigma)[0] < -1e-10:
        raise ValidationError("sigma is not positive semidefinite")
    if require_unit_trace and abs(np.trace(sigma).real - 1) > 1e-12:
        raise ValidationError(f"sigma has trace {np.trace(sigma).real!r}, expected 1")
    return sigma


def _coherent_columns(photon_numbers: Sequence[int], theta: float, phi: float, basis: TwoModeBasis) -> np.ndarray:
    V = np.zeros((basis.dim, len(photon_numbers)), dtype=complex)
    for i, N in enumerate(photon_numbers):
        if not 0 <= N <= basis.nmax:
            raise CutoffExceededError(f"photon number {N} outside 0..{basis.nmax}")
        V[basis.block(N), i] = coherent_amplitudes(N, theta, phi)
    return V


def perfect_mixed_state(
    sigma,
    theta: float,
    phi: float,
    basis: TwoModeBasis,
    photon_numbers: Sequence[int] | None = None,
) -> DensityMatrix:
    """sum_{N,N'} sigma_{N,N'} |theta phi^(N)><theta phi^(N')|.

    Row/column i of ``sigma`` refers to photon number ``photon_numbers[i]``
    (default: i itself).
    """
    sigma = _check_sigma(sigma, require_unit_trace=True)
    if photon_numbers is None:
        photon_numbers = list(range(sigma.shape[0]))
    if len(photon_numbers) != sigma.shape[0] or len(set(photon_numbers)) != len(photon_numbers):
        raise ValidationError("photon_numbers must list one distinct N per row of sigma")
    V = _coherent_columns(photon_numbers, theta, phi, basis)
    return DensityMatrix(basis, V @ sigma @ V.conj().T)


def ensemble_from_sigma(sigma, rtol: float = 1e-14) -> list[np.ndarray]:
    """Vectors lambda^(i) with sum_i lambda^(i) lambda^(i)^dag = sigma.

    A diagonal sigma yields one vector per nonzero diagonal entry; otherwise
    the eigendecomposition is used, dropping eigenvalues below ``rtol`` times
    the largest.
    """
    sigma = _check_sigma(sigma, require_unit_trace=False)
    d = sigma.shape[0]
    off = sigma - np.diag(np.diag(sigma))
    if not np.any(off):
        out = []
        for i in range(d):
            if sigma[i, i].real > 0:
                v = np.zeros(d, dtype=complex)
                v[i] = np.sqrt(sigma[i, i].real)
                out.append(v)
        return out
    w, v = np.linalg.eigh(sigma)
    keep = w > rtol * max(w[-1], 0.0)
    return [np.sqrt(wi) * v[:, i] for i, wi in zip(np.flatnonzero(keep), w[keep])][::-1]


class TableRow(str, enum.Enum):
    PURE_FIXED_N = "pure-fixed-N"
    PURE_INDETERMINATE_N = "pure-indeterminate-N"
    MIXED_DIAGONAL = "mixed-diagonal"
    MIXED_GENERAL = "mixed-general"
    NOT_PERFECT = "not-perfect"


@dataclass(frozen=True)
class ClassificationReport:
    p: float | None
    is_perfect: bool
    aligned_direction: tuple[float, float] | None
    residual_b_occupation: float | None
    table_row: TableRow
    s0: float = 0.0


def classify_perfect(state: State, tol: float = 1e-9) -> ClassificationReport:
    """Decide perfect polarization and place the state in the hierarchy.

    The state is rotated so that S points along +S1; a perfectly polarized
    state must then leave mode b empty, which is checked through <b^dag b>.
    """
    sv = stokes_vector(state)
    p = sv.p
    if p is None or sv.magnitude == 0:
        return ClassificationReport(p, False, None, None, TableRow.NOT_PERFECT, sv.s0)

    direction = direction_angles(sv.vector)
    aligned = apply_rotation(Rotation(*direction), state, inverse=True)
    residual = expectation(number_operator_b(state.basis), aligned).real
    perfect = abs(p - 1) <= tol and residual <= tol * sv.s0
    if not perfect:
        return ClassificationReport(p, False, direction, residual, TableRow.NOT_PERFECT, sv.s0)

    basis = state.basis
    if isinstance(state, PureState) or state.purity() >= 1 - tol:
        single = len(state.support(atol=1e-14)) == 1
        row = TableRow.PURE_FIXED_N if single else TableRow.PURE_INDETERMINATE_N
    else:
        rho = aligned.matrix
        block_of = basis.photon_numbers
        cross = block_of[:, None] != block_of[None, :]
        coherence = float(np.max(np.abs(rho[cross]))) if np.any(cross) else 0.0
        row = TableRow.MIXED_DIAGONAL if coherence <= tol else TableRow.MIXED_GENERAL
    return ClassificationReport(p, True, direction, residual, row, sv.s0)


STRATEGIES = ("fixed-n", "bracketed", "glauber")


@dataclass(frozen=True)
class DecompositionResult:
    p: float
    polarized: DensityMatrix | None
    unpolarized: DensityMatrix | None
    strategy: str
    min_eigenvalue_unpolarized: float | None
    physical: bool
    direction: tuple[float, float] | None = None

    def reconstruct(self) -> np.ndarray:
        basis = (self.polarized or self.unpolarized).basis
        out = np.zeros((basis.dim, basis.dim), dtype=complex)
        if self.polarized is not None:
            out += self.p * self.polarized.matrix
        if self.unpolarized is not None:
            out += (1 - self.p) * self.unpolarized.matrix
        return out


def _glauber_weights(mean: float, nmax: int) -> np.ndarray:
    """Truncated Poisson weights over N = 0..nmax whose mean equals ``mean``."""
    if not 0 < mean < nmax:
        raise NumericalError(f"no truncated coherent state has mean photon number {mean} with nmax={nmax}")
    N = np.arange(nmax + 1)
    log_fact = gammaln(N + 1)

    def weights(log_r2):
        logq = log_r2 * N - log_fact
        return np.exp(logq - logsumexp(logq))

    def excess(log_r2):
        return weights(log_r2) @ N - mean

    lo, hi = math.log(mean) - 1.0, math.log(mean) + 1.0
    while excess(lo) > 0:
        lo -= 10.0
    while excess(hi) < 0:
        hi += 10.0
        if hi > 1e4:
            raise NumericalError("could not bracket the coherent-state amplitude")
    root = scipy.optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    q = weights(root)
    if abs(q @ N - mean) > 1e-10:
        raise NumericalError(f"mean photon number solve missed by {abs(q @ N - mean):.3e}")
    return q


def polarized_component(
    s: StokesVector, basis: TwoModeBasis, strategy: str = "bracketed", fixed_n: int | None = None
) -> DensityMatrix:
    """A perfectly polarized state along S with mean photon number S0."""
    theta, phi = direction_angles(s.vector)
    S0 = s.s0
    if strategy == "fixed-n":
        if fixed_n is None:
            raise ValidationError("fixed-n strategy needs fixed_n")
        if abs(fixed_n - S0) > 1e-9:
            raise InconsistentStrategyError(f"fixed photon number {fixed_n} differs from S0 = {S0!r}")
        return su2_coherent(fixed_n, theta, phi, basis).to_density_matrix()
    if strategy == "bracketed":
        lo = math.floor(S0 + 1e-12)
        if abs(S0 - round(S0)) <= 1e-12:
            return su2_coherent(int(round(S0)), theta, phi, basis).to_density_matrix()
        hi = lo + 1
        w = hi - S0
        return perfect_mixed_state(np.diag([w, 1 - w]), theta, phi, basis, [lo, hi])
    if strategy == "glauber":
        q = _glauber_weights(S0, basis.nmax)
        V = _coherent_columns(range(basis.nmax + 1), theta, phi, basis)
        return PureState(basis, V @ np.sqrt(q)).to_density_matrix()
    raise ValidationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def decompose(
    rho: State, strategy: str = "bracketed", fixed_n: int | None = None, tol: float = 1e-12
) -> DecompositionResult:
    """rho = (1 - p) rho_A + p rho_B with rho_B perfectly polarized along S.

    Positivity of rho_A is reported (``physical``), never imposed.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density_matrix()
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    sv = stokes_vector(rho)
    p = sv.p
    if p is None:
        raise UndefinedPolarizationError("degree of polarization is undefined for the vacuum")
    if p <= tol:
        lo = float(np.linalg.eigvalsh(rho.matrix)[0])
        return DecompositionResult(0.0, None, rho, "trivial-unpolarized", lo, lo >= -1e-10)
    if p >= 1 - tol:
        return DecompositionResult(1.0, rho, None, "trivial-polarized", None, True, sv.direction)

    rho_b = polarized_component(sv, rho.basis, strategy, fixed_n)
    a = (rho.matrix - p * rho_b.matrix) / (1 - p)
    with tolerances(trace=1e-9, hermitian=1e-9):
        rho_a = DensityMatrix(rho.basis, a, check_positive=False)
    lo = float(np.linalg.eigvalsh(rho_a.matrix)[0])
    return DecompositionResult(p, rho_b, rho_a, strategy, lo, lo >= -1e-10, sv.direction)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


@dataclass(frozen=True)
class FeasibilitySearch:
    n_alpha: int = 200
    n_beta: int = 256
    threshold: float = 1e-3


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of trying psi = alpha |Omega> + (unpolarized pure remainder).

    ``min_p_remainder`` is the smallest |S(Phi)| / S0(Phi) found for the
    remainder Phi ~ psi - alpha Omega.
    """

    status: str  # already-unpolarized | degenerate-feasible | feasible | infeasible
    stokes: StokesVector
    direction: tuple[float, float] | None = None
    omega_photon_numbers: tuple[int, ...] = ()
    omega_coefficients: tuple[complex, ...] = ()
    overlap: tuple[complex, complex, complex] | None = None
    coplanarity_residual: float | None = None
    coplanarity_normalized: float | None = None
    min_p_remainder: float | None = None
    best_weights: tuple[complex, ...] = ()  # alpha * c_N at the optimum
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.status in ("feasible", "degenerate-feasible", "already-unpolarized")


def _omega_coefficients(psi: PureState, c_coeffs) -> tuple[list[int], np.ndarray]:
    if c_coeffs is None:
        q = psi.block_populations()
        ns = [N for N in range(len(q)) if q[N] > 1e-14]
        c = np.sqrt(q[ns]).astype(complex)
    elif isinstance(c_coeffs, Mapping):
        ns = sorted(int(k) for k in c_coeffs)
        c = np.array([complex(c_coeffs[k]) for k in sorted(c_coeffs, key=int)])
    else:
        c = np.asarray(c_coeffs, dtype=complex)
        ns = list(range(c.size))
    for N in ns:
        if not 0 <= N <= psi.basis.nmax:
            raise CutoffExceededError(f"Omega coefficient for N={N} outside 0..{psi.basis.nmax}")
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ValidationError("Omega coefficients are all zero")
    return ns, c / norm


def pure_decomposition_feasibility(
    psi: PureState,
    c_coeffs=None,
    direction: tuple[float, float] | None = None,
    search: FeasibilitySearch = FeasibilitySearch(),
) -> FeasibilityReport:
    """Can psi be split into a pure state polarized along ``direction`` and a
    pure remainder with zero Stokes 3-vector?

    ``Omega = sum_N c_N |theta phi^(N)>`` with (theta, phi) = ``direction``
    (default: the direction of S(psi)) and ``c_coeffs`` given as ``{N: c_N}``
    or a sequence indexed by N (default: sqrt of the block populations of psi).
    The grid over (|alpha|, beta) uses the supplied Omega; the local
    refinement also frees the Omega coefficients on the same photon numbers.
    """
    sv = stokes_vector(psi)
    if sv.magnitude <= S0_FLOOR * max(sv.s0, 1.0):
        return FeasibilityReport("already-unpolarized", sv)
    n_hat_s = np.asarray(sv.vector) / sv.magnitude
    if direction is None:
        direction = direction_angles(sv.vector)
        if abs(sv.p - 1) <= 1e-10:
            return FeasibilityReport(
                "degenerate-feasible", sv, direction, notes=("psi is itself perfectly polarized; the remainder vanishes",)
            )
    theta, phi = direction
    n_hat = unit_vector(theta, phi)

    basis = psi.basis
    ns, c = _omega_coefficients(psi, c_coeffs)
    V = _coherent_columns(ns, theta, phi, basis)
    omega = V @ c
    ops = [op.matrix for op in stokes_operators(basis)]
    x = psi.amplitudes

    overlap = np.array([np.vdot(omega, S @ x) for S in ops[1:]])
    s1, s2 = overlap.real, overlap.imag
    triple = float(abs(n_hat @ np.cross(s1, s2)))
    denom = np.linalg.norm(s1) * np.linalg.norm(s2)
    triple_norm = triple / denom if denom > 0 else 0.0

    # <psi|S|psi>, <e_N|S|psi>, <e_N|S|e_N> (the last is diagonal in N)
    A = np.array([np.vdot(x, S @ x).real for S in ops])
    C = np.array([[np.vdot(V[:, k], S @ x) for k in range(len(ns))] for S in ops])
    B = np.array([[np.vdot(V[:, k], S @ V[:, k]).real for k in range(len(ns))] for S in ops])

    def p2(v):
        s = A + B @ (np.abs(v) ** 2) - 2 * np.real(C @ np.conj(v))
        return float(np.sum(s[1:] ** 2) / s[0] ** 2) if s[0] > 0 else np.inf

    mags = np.linspace(0.0, 1.0, search.n_alpha + 2)[1:-1]
    betas = np.linspace(0.0, 2 * np.pi, search.n_beta, endpoint=False)
    alpha = mags[:, None] * np.exp(-1j * betas)[None, :]  # alpha = |alpha| e^{-i beta}
    Bc = B @ (np.abs(c) ** 2)
    Cc = C @ np.conj(c)
    S_grid = A[:, None, None] + Bc[:, None, None] * np.abs(alpha) ** 2 - 2 * np.real(np.conj(alpha)[None] * Cc[:, None, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        p2_grid = np.where(S_grid[0] > 0, np.sum(S_grid[1:] ** 2, axis=0) / S_grid[0] ** 2, np.inf)
    ia, ib = np.unravel_index(np.argmin(p2_grid), p2_grid.shape)
    v0 = alpha[ia, ib] * c

    K = len(ns)

    def unpack(z):
        w = z[:K] + 1j * z[K:]
        return w / np.sqrt(1.0 + np.vdot(w, w).real)  # open unit ball

    w0 = v0 / np.sqrt(1.0 - np.vdot(v0, v0).real)
    res = scipy.optimize.minimize(lambda z: p2(unpack(z)), np.concatenate([w0.real, w0.imag]), method="BFGS",
                                  options={"gtol": 1e-14, "maxiter": 2000})
    best_v = unpack(res.x) if res.fun < p2_grid[ia, ib] else v0
    best = min(res.fun, p2_grid[ia, ib], p2(np.zeros(K)))
    min_p = math.sqrt(max(best, 0.0))

    notes = []
    if n_hat @ n_hat_s < 1 - 1e-9:
        notes.append(
            f"Omega direction differs from S(psi)/|S(psi)| (cosine {float(n_hat @ n_hat_s):.6f})"
        )
    status = "infeasible" if min_p > search.threshold else "feasible"
    return FeasibilityReport(
        status,
        sv,
        (float(theta), float(phi)),
        tuple(ns),
        tuple(complex(z) for z in c),
        tuple(complex(z) for z in overlap),
        triple,
        float(triple_norm),
        min_p,
        tuple(complex(z) for z in best_v),
        tuple(notes),
    )


def counterexample_state(N: int, basis: TwoModeBasis | None = None) -> PureState:
    """(|0,N> + |N-1,1>)/sqrt(2), N > 1."""
    if N <= 1:
        raise ValidationError("the counterexample needs N > 1")
    basis = basis or TwoModeBasis(N)
    return PureState.from_components(basis, {(0, N): 1.0, (N - 1, 1): 1.0})


@dataclass(frozen=True)
class CounterexampleAnalysis:
    n: int
    stokes: StokesVector
    reference_frame: FeasibilityReport  # Omega = sum c_M |M,0>, polarized along +S1
    stokes_frame: FeasibilityReport  # Omega polarized along the computed S
    caveats: tuple[str, ...]


def counterexample_analysis(N: int, search: FeasibilitySearch = FeasibilitySearch()) -> CounterexampleAnalysis:
    """Feasibility of the polarized/unpolarized pure split for (|0,N> + |N-1,1>)/sqrt(2).

    Two frames are analysed with Omega restricted to the N-photon block:
    Omega = |N,0> (polarized along +S1, the frame in which the overlap takes
    the form sqrt(N/2) c_N^* (0, 1, -i)), and Omega along the actually
    computed Stokes direction.
    """
    psi = counterexample_state(N)
    sv = stokes_vector(psi)
    ref = pure_decomposition_feasibility(psi, {N: 1.0}, direction=(0.0, 0.0), search=search)
    own = pure_decomposition_feasibility(psi, {N: 1.0}, search=search)
    caveats = []
    if sv.vector[0] < 0:
        caveats.append(f"S1 = {sv.vector[0]:.17g} is negative: S points along -S1, not +S1")
    if abs(sv.vector[1]) > 1e-12 or abs(sv.vector[2]) > 1e-12:
        caveats.append(f"S2 = {sv.vector[1]:.17g}, S3 = {sv.vector[2]:.17g}: S is not along the S1 axis")
    return CounterexampleAnalysis(N, sv, ref, own, tuple(caveats))

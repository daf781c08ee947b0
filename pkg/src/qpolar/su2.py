"""SU(2) coherent states and polarization rotations on the truncated Fock space.

Stokes 3-vectors are ordered (S1, S2, S3) with S1 as the polar axis, so the
direction (theta, phi) is the unit vector

    n(theta, phi) = (cos theta, sin theta cos phi, sin theta sin phi).

Two independent constructions of the Fock-space rotation are provided: an
exact blockwise exponential of the Hermitian generator, and the
lower/diagonal/upper (Gauss) factorization evaluated in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np
from scipy.special import gammaln

from .errors import CutoffExceededError, SingularDecompositionError, ValidationError
from .fock import DensityMatrix, OperatorMatrix, PureState, State, TwoModeBasis, _same_basis, stokes_operators

TWO_PI = 2.0 * np.pi
GAUSS_THETA_MARGIN = 0.01

# Pauli-type 2x2 images of S1, S2, S3 in the (a, b) mode ordering.
_SIGMA = (
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
)


def unit_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)])


def direction_angles(vector) -> tuple[float, float]:
    """Angles (theta, phi) of a nonzero 3-vector; phi is 0 on the poles."""
    v = np.asarray(vector, dtype=float)
    r = np.linalg.norm(v)
    if r == 0:
        raise ValueError("zero vector has no direction")
    theta = float(np.arccos(np.clip(v[0] / r, -1.0, 1.0)))
    if math.hypot(v[1], v[2]) <= 1e-15 * r:
        return theta, 0.0
    return theta, float(np.arctan2(v[2], v[1]) % TWO_PI)


@dataclass(frozen=True)
class Rotation:
    """Polarization rotation R(theta, phi), optionally preceded by a phase
    rotation about the S1 axis by ``psi``.

    R(theta, phi) takes the S1 axis to n(theta, phi) and maps |N,0> to the
    SU(2) coherent state |theta phi^(N)>.
    """

    theta: float
    phi: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not -1e-12 <= theta <= np.pi + 1e-12:
            raise ValidationError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), np.pi))
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "psi", float(self.psi))

    @classmethod
    def aligning(cls, vector) -> "Rotation":
        """Rotation taking the S1 axis onto ``vector / |vector|``."""
        return cls(*direction_angles(vector))

    @cached_property
    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        r = np.array([[c, -np.exp(-1j * self.phi) * s], [np.exp(1j * self.phi) * s, c]])
        if self.psi:
            r = r @ np.diag([np.exp(-0.5j * self.psi), np.exp(0.5j * self.psi)])
        r.flags.writeable = False
        return r

    def so3(self) -> np.ndarray:
        """3x3 rotation acting on (S1, S2, S3) Stokes vectors."""
        u = self.matrix
        return np.array(
            [[0.5 * np.real(np.trace(si @ u @ sj @ u.conj().T)) for sj in _SIGMA] for si in _SIGMA]
        )


@dataclass(frozen=True)
class PolarizedPureSpec:
    """Weights ``(N, q_N, varphi_N)`` of a perfectly polarized pure state along (theta, phi)."""

    theta: float
    phi: float
    weights: tuple[tuple[int, float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        w = tuple((int(N), float(q), float(vp)) for N, q, vp in self.weights)
        if not w:
            raise ValidationError("at least one weight is required")
        if any(N < 0 for N, _, _ in w) or any(q < 0 for _, q, _ in w):
            raise ValidationError("photon numbers and weights must be non-negative")
        if len({N for N, _, _ in w}) != len(w):
            raise ValidationError("photon numbers must be distinct")
        total = sum(q for _, q, _ in w)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", w)


def glauber_spec(r: float, delta: float, theta: float, phi: float, nmax: int) -> PolarizedPureSpec:
    """Two-mode Glauber coherent state as a polarized spec, truncated at ``nmax``
    and renormalized: q_N proportional to r^(2N)/N!, varphi_N = delta N."""
    N = np.arange(nmax + 1)
    logq = 2 * N * np.log(r) - gammaln(N + 1) if r > 0 else np.where(N == 0, 0.0, -np.inf)
    q = np.exp(logq - np.max(logq))
    q /= q.sum()
    return PolarizedPureSpec(theta, phi, tuple((int(n), float(qn), float(delta * n)) for n, qn in zip(N, q)))


def coherent_amplitudes(N: int, theta: float, phi: float) -> np.ndarray:
    """Block amplitudes c_m, m = 0..N, of |theta phi^(N)> on |m, N-m>."""
    m = np.arange(N + 1)
    log_binom = gammaln(N + 1) - gammaln(m + 1) - gammaln(N - m + 1)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    mag = np.exp(0.5 * log_binom) * c**m * s ** (N - m)
    return mag * np.exp(1j * phi * (N - m))


def su2_coherent(N: int, theta: float, phi: float, basis: TwoModeBasis) -> PureState:
    if not 0 <= N <= basis.nmax:
        raise CutoffExceededError(f"N={N} outside 0..{basis.nmax}")
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.block(N)] = coherent_amplitudes(N, theta, phi)
    return PureState(basis, amps)


def _generator(rot: Rotation, basis: TwoModeBasis) -> np.ndarray:
    _, _, s2, s3 = stokes_operators(basis)
    return 0.5 * rot.theta * (np.sin(rot.phi) * s2.matrix - np.cos(rot.phi) * s3.matrix)


def rotation_fock_exp(rot: Rotation, basis: TwoModeBasis) -> OperatorMatrix:
    """exp[i theta/2 (S2 sin phi - S3 cos phi)], blockwise through the
    eigendecomposition of the Hermitian generator."""
    H = _generator(rot, basis)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for N, s in basis.blocks():
        w, v = np.linalg.eigh(H[s, s])
        out[s, s] = (v * np.exp(1j * w)) @ v.conj().T
    if rot.psi:
        out = out * _psi_phases(rot.psi, basis)[None, :]
    return OperatorMatrix(basis, out)


def _psi_phases(psi: float, basis: TwoModeBasis) -> np.ndarray:
    # exp(-i psi S1 / 2) is diagonal
    return np.array([np.exp(-0.5j * psi * (m - n)) for m, n in basis.labels])


def _gauss_block(N: int, theta: float, phi: float) -> np.ndarray:
    half = theta / 2
    cos_h = math.cos(half)
    lost = 3 * N * max(0.0, -math.log10(cos_h)) + N * math.log10(4.0)
    with mpmath.workdps(30 + int(math.ceil(lost))):
        th = mpmath.mpf(theta) / 2
        ph = mpmath.mpf(phi)
        t = mpmath.tan(th)
        a = mpmath.expj(ph) * t
        c = -mpmath.expj(-ph) * t
        b = mpmath.log(mpmath.cos(th))
        dim = N + 1
        # block basis position k <-> |k, N-k>
        lower = mpmath.matrix(dim, dim)  # S- = b^dag a : |k> -> sqrt(k (N-k+1)) |k-1>
        upper = mpmath.matrix(dim, dim)  # S+ = a^dag b : |k> -> sqrt((k+1)(N-k)) |k+1>
        for k in range(dim):
            if k > 0:
                lower[k - 1, k] = mpmath.sqrt(k * (N - k + 1))
            if k < N:
                upper[k + 1, k] = mpmath.sqrt((k + 1) * (N - k))
        exp_lower = _nilpotent_exp(lower * a, dim)
        exp_upper = _nilpotent_exp(upper * c, dim)
        diag = mpmath.matrix(dim, dim)
        for k in range(dim):
            diag[k, k] = mpmath.exp(b * (2 * k - N))
        prod = exp_lower * diag * exp_upper
        return np.array([[complex(prod[i, j]) for j in range(dim)] for i in range(dim)])


def _nilpotent_exp(x, dim):
    result = mpmath.eye(dim)
    term = mpmath.eye(dim)
    for k in range(1, dim):
        term = term * x / k
        result += term
    return result


def rotation_fock_gauss(rot: Rotation, basis: TwoModeBasis) -> OperatorMatrix:
    """Rotation through exp(a S-) exp(b S1) exp(c S+) with
    a = e^{i phi} tan(theta/2), b = ln cos(theta/2), c = -e^{-i phi} tan(theta/2).

    The ladder factors are finite polynomials inside each block. The diagonal
    factor grows like cos(theta/2)^-N, so the product is formed in extended
    precision sized to the expected cancellation.
    """
    if rot.theta > np.pi - GAUSS_THETA_MARGIN:
        raise SingularDecompositionError(
            f"Gauss factorization is singular near theta = pi (theta={rot.theta}); use rotation_fock_exp"
        )
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for N, s in basis.blocks():
        out[s, s] = _gauss_block(N, rot.theta, rot.phi)
    if rot.psi:
        out = out * _psi_phases(rot.psi, basis)[None, :]
    return OperatorMatrix(basis, out)


def apply_rotation(rot: Rotation, state: State, method: str = "exp", inverse: bool = False) -> State:
    """R|psi> or R rho R^dag (R^dag instead of R with ``inverse=True``)."""
    if method == "exp":
        R = rotation_fock_exp(rot, state.basis)
    elif method == "gauss":
        R = rotation_fock_gauss(rot, state.basis)
    else:
        raise ValueError(f"unknown rotation method {method!r}")
    _same_basis(R.basis, state.basis)
    U = R.matrix.conj().T if inverse else R.matrix
    if isinstance(state, PureState):
        return PureState(state.basis, U @ state.amplitudes)
    return DensityMatrix(state.basis, U @ state.matrix @ U.conj().T, check_positive=False)


def polarized_pure_state(spec: PolarizedPureSpec, basis: TwoModeBasis) -> PureState:
    """Superposition of co-directional SU(2) coherent states,
    sum_N e^{i varphi_N} sqrt(q_N) |theta phi^(N)>."""
    amps = np.zeros(basis.dim, dtype=complex)
    for N, q, vp in spec.weights:
        if N > basis.nmax:
            raise CutoffExceededError(f"weight on N={N} exceeds nmax={basis.nmax}")
        amps[basis.block(N)] = np.exp(1j * vp) * np.sqrt(q) * coherent_amplitudes(N, spec.theta, spec.phi)
    return PureState(basis, amps)

"""Majorana constellations of fixed-N two-mode states.

An N-photon state is, up to normalization and phase, a product of N rotated
creation operators

    prod_k (cos(theta_k/2) a^dag + e^{i phi_k} sin(theta_k/2) b^dag) |vac>,

so its block amplitudes are c_{N-j} ~ sqrt((N-j)! j!) * [coefficient of
x^{N-j} y^j in prod_k (u_k x + v_k y)]. Going backwards, the stars are the
roots t_k = -zeta_k of Q(t) = sum_j c_{N-j} / sqrt((N-j)! j!) t^{N-j}, with
zeta_k = e^{i phi_k} tan(theta_k/2); a degree deficit of d puts d stars on the
south pole (theta = pi).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import CutoffExceededError, MultiBlockError, ValidationError
from .fock import PureState, TwoModeBasis
from .su2 import Rotation, TWO_PI, direction_angles, rotation_fock_exp, unit_vector

ROOT_AT_INFINITY_RTOL = 1e-13


@dataclass(frozen=True)
class Constellation:
    n_photons: int
    points: tuple[tuple[float, float], ...]
    # |Q(t)| / sum |d_j t^j| after the Newton polish; empty when not from root finding
    root_residuals: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        pts = tuple((float(t), float(p) % TWO_PI) for t, p in self.points)
        if len(pts) != self.n_photons:
            raise ValidationError(f"constellation of N={self.n_photons} needs {self.n_photons} stars, got {len(pts)}")
        for t, _ in pts:
            if not -1e-12 <= t <= np.pi + 1e-12:
                raise ValidationError(f"star polar angle {t} outside [0, pi]")
        object.__setattr__(self, "points", pts)

    def unit_vectors(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 3))
        return np.array([unit_vector(t, p) for t, p in self.points])

    def rotated(self, rot: Rotation) -> "Constellation":
        M = rot.so3()
        return Constellation(self.n_photons, tuple(direction_angles(M @ v) for v in self.unit_vectors()))

    def min_separation(self) -> float:
        """Smallest pairwise angle between stars (inf for N < 2)."""
        v = self.unit_vectors()
        if len(v) < 2:
            return float("inf")
        g = np.clip(v @ v.T, -1.0, 1.0)
        iu = np.triu_indices(len(v), 1)
        return float(np.min(np.arccos(g[iu])))


def _block_weights(N: int) -> np.ndarray:
    """sqrt((N-j)! j!) for j = 0..N, in log space for large N."""
    j = np.arange(N + 1)
    return np.exp(0.5 * (gammaln(N - j + 1) + gammaln(j + 1)))


def constellation_to_state(c: Constellation, basis: TwoModeBasis) -> PureState:
    N = c.n_photons
    if N > basis.nmax:
        raise CutoffExceededError(f"N={N} exceeds nmax={basis.nmax}")
    poly = np.array([1.0 + 0j])  # index j = power of y
    for theta, phi in c.points:
        u, v = np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)
        nxt = np.zeros(poly.size + 1, dtype=complex)
        nxt[:-1] += u * poly
        nxt[1:] += v * poly
        poly = nxt
    coeff_by_j = poly * _block_weights(N)
    amps = np.zeros(basis.dim, dtype=complex)
    # block position m holds |m, N-m>, i.e. j = N - m
    amps[basis.block(N)] = coeff_by_j[::-1]
    return PureState(basis, amps)


def single_block(state: PureState, block: int | None = None) -> tuple[int, np.ndarray]:
    """Return ``(N, c)`` with c the normalized amplitudes of the one occupied block.

    With ``block`` given, that block is extracted (and renormalized) from a
    possibly multi-block state.
    """
    if block is None:
        support = state.support(atol=1e-24)
        if len(support) != 1:
            raise MultiBlockError(f"state occupies blocks {support}; a single N-block is required")
        block = support[0]
    if not 0 <= block <= state.basis.nmax:
        raise CutoffExceededError(f"block {block} outside 0..{state.basis.nmax}")
    c = np.array(state.amplitudes[state.basis.block(block)])
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ValidationError(f"block N={block} is empty")
    return block, c / norm


def _balanced_companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of sum_i coeffs[i] t^(n-i) (coeffs[0] != 0) via a balanced companion matrix."""
    n = coeffs.size - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -coeffs[1:] / coeffs[0]
    comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    balanced, _ = scipy.linalg.matrix_balance(comp, permute=False)
    return scipy.linalg.eigvals(balanced, overwrite_a=True, check_finite=False)


def state_to_constellation(state: PureState, block: int | None = None) -> Constellation:
    N, c = single_block(state, block)
    if N < 1:
        raise ValidationError("the vacuum has no Majorana stars")
    # d[j] multiplies t^(N-j)
    d = c[::-1] / _block_weights(N)
    scale = np.linalg.norm(d)
    small = np.abs(d) < ROOT_AT_INFINITY_RTOL * scale
    lead = int(np.argmin(small))  # leading negligible coefficients: stars at theta = pi
    trail = int(np.argmin(small[::-1]))  # trailing negligible coefficients: roots t = 0
    core = d[lead : d.size - trail]

    roots = _balanced_companion_roots(core)
    residuals = []
    dcore = np.polyder(core) if core.size > 1 else np.zeros(1)
    polished = []
    for t in roots:
        q, dq = np.polyval(core, t), np.polyval(dcore, t)
        scale_t = np.polyval(np.abs(core), abs(t))
        cand = t - q / dq if dq != 0 else t
        q_new = np.polyval(core, cand)
        if abs(q_new) < abs(q):
            t, q = cand, q_new
            scale_t = np.polyval(np.abs(core), abs(t))
        polished.append(t)
        residuals.append(float(abs(q) / scale_t) if scale_t > 0 else 0.0)

    points = [(0.0, 0.0)] * trail
    residuals = [0.0] * trail + residuals
    for t in polished:
        zeta = -t
        points.append((2.0 * np.arctan(abs(zeta)), float(np.angle(zeta)) % TWO_PI))
    points += [(np.pi, 0.0)] * lead
    residuals += [0.0] * lead
    return Constellation(N, tuple(points), tuple(residuals))


class MaxFidelity(NamedTuple):
    fidelity: float
    theta: float
    phi: float
    gradient_norm: float
    iterations: int


@dataclass(frozen=True)
class FidelitySearch:
    n_theta: int = 64
    n_phi: int = 128
    gradient_tol: float = 1e-10
    max_iter: int = 200
    max_step: float = 0.5


def coherent_overlaps(c: np.ndarray, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """|<theta phi^(N)|psi>| on the outer grid thetas x phis, for block amplitudes c."""
    N = c.size - 1
    m = np.arange(N + 1)
    sqrt_binom = np.exp(0.5 * (gammaln(N + 1) - gammaln(m + 1) - gammaln(N - m + 1)))
    cos_h = np.cos(thetas / 2)[:, None] ** m
    sin_h = np.sin(thetas / 2)[:, None] ** (N - m)
    radial = sqrt_binom * cos_h * sin_h  # (n_theta, N+1)
    phase = np.exp(-1j * np.outer(phis, N - m))  # (n_phi, N+1)
    return np.abs(np.einsum("tm,pm,m->tp", radial, phase, c))


def _log_fidelity_derivs(p: np.ndarray, w: complex, N: int):
    """h = log|P(w)|^2 - N log(1+|w|^2) with first and second Wirtinger derivatives.

    ``p`` are polynomial coefficients in increasing powers of w. The coherent
    state overlap is P(conj(zeta)) / (1 + |zeta|^2)^(N/2).
    """
    P = np.polynomial.polynomial.polyval(w, p)
    dP = np.polynomial.polynomial.polyval(w, np.polynomial.polynomial.polyder(p)) if N else 0j
    d2P = np.polynomial.polynomial.polyval(w, np.polynomial.polynomial.polyder(p, 2)) if N > 1 else 0j
    r2 = 1.0 + abs(w) ** 2
    h = np.log(abs(P) ** 2) - N * np.log(r2)
    s = dP / P
    h_w = s - N * np.conj(w) / r2
    h_ww = d2P / P - s * s + N * np.conj(w) ** 2 / r2**2
    h_wwbar = -N / r2**2
    grad = np.array([2 * h_w.real, -2 * h_w.imag])
    hess = np.array(
        [
            [2 * h_ww.real + 2 * h_wwbar, -2 * h_ww.imag],
            [-2 * h_ww.imag, -2 * h_ww.real + 2 * h_wwbar],
        ]
    )
    return h, grad, hess


def max_fidelity_su2(state: PureState, block: int | None = None, search: FidelitySearch = FidelitySearch()) -> MaxFidelity:
    """Largest overlap |<theta phi^(N)|psi>| with any SU(2) coherent state.

    A coarse theta x phi grid picks a seed (ties go to the smallest theta, then
    phi). The state is rotated so the seed sits on the S1 pole, and a
    saddle-free Newton iteration in the stereographic chart around that pole
    refines the optimum until the fidelity gradient falls below
    ``search.gradient_tol``.
    """
    N, c = single_block(state, block)
    if N < 1:
        raise ValidationError("fidelity search needs N >= 1")

    thetas = np.linspace(0.0, np.pi, search.n_theta)
    phis = np.linspace(0.0, TWO_PI, search.n_phi, endpoint=False)
    grid = coherent_overlaps(c, thetas, phis)
    it, ip = np.unravel_index(np.argmax(grid), grid.shape)  # first max in C order: smallest theta, then phi
    seed = Rotation(thetas[it], phis[ip])

    basis = TwoModeBasis(N)
    R = rotation_fock_exp(seed, basis).matrix[basis.block(N), basis.block(N)]
    c_local = R.conj().T @ c

    m = np.arange(N + 1)
    sqrt_binom = np.exp(0.5 * (gammaln(N + 1) - gammaln(m + 1) - gammaln(N - m + 1)))
    # P(w) = sum_m sqrt(C(N,m)) c_m w^(N-m), coefficients by increasing power k = N - m
    p = (sqrt_binom * c_local)[::-1]

    w = 0j
    h, g, H = _log_fidelity_derivs(p, w, N)
    iterations = 0
    grad_norm = np.linalg.norm(g) * 0.5 * np.exp(h / 2)
    while grad_norm > search.gradient_tol and iterations < search.max_iter:
        iterations += 1
        lam, vec = np.linalg.eigh(H)
        gv = vec.T @ g
        # ascend: divide by |lambda| with a floor so saddles and flats still move uphill
        step = vec @ (gv / np.maximum(np.abs(lam), 1e-8))
        norm = np.linalg.norm(step)
        if norm > search.max_step:
            step *= search.max_step / norm
        t = 1.0
        while True:
            w_new = w + complex(step[0] * t, step[1] * t)
            h_new, g_new, H_new = _log_fidelity_derivs(p, w_new, N)
            # slack covers rounding in h once the gain drops below ~1e-16
            if h_new >= h - 1e-13 * max(1.0, abs(h)) or t < 1e-12:
                break
            t *= 0.5
        w, h, g, H = w_new, h_new, g_new, H_new
        grad_norm = np.linalg.norm(g) * 0.5 * np.exp(h / 2)

    zeta = np.conj(w)
    local_dir = unit_vector(2.0 * np.arctan(abs(zeta)), float(np.angle(zeta)))
    theta, phi = direction_angles(seed.so3() @ local_dir)
    fid = float(np.exp(h / 2))
    return MaxFidelity(min(fid, 1.0), theta, phi, float(grad_norm), iterations)

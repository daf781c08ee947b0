"""Random states and constellations for property tests and survey scripts."""

from __future__ import annotations

import numpy as np
import scipy.optimize

from .fock import DensityMatrix, PureState, TwoModeBasis
from .majorana import Constellation
from .su2 import direction_angles


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_direction(rng: np.random.Generator) -> tuple[float, float]:
    v = rng.normal(size=3)
    return direction_angles(v)


def random_pure_state(basis: TwoModeBasis, rng: np.random.Generator, blocks=None) -> PureState:
    """Gaussian amplitudes on the listed blocks (default: every block)."""
    amps = np.zeros(basis.dim, dtype=complex)
    for N in range(basis.nmax + 1) if blocks is None else blocks:
        s = basis.block(N)
        amps[s] = _ginibre(rng, s.stop - s.start)
    return PureState(basis, amps)


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Unit-trace positive semidefinite matrix of the given rank (default full)."""
    G = _ginibre(rng, (dim, rank or dim))
    M = G @ G.conj().T
    M = 0.5 * (M + M.conj().T)
    return M / np.trace(M).real


def random_density_matrix(basis: TwoModeBasis, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    return DensityMatrix(basis, random_psd(basis.dim, rng, rank))


def tilt_to_mean(rho: DensityMatrix, target: float) -> DensityMatrix:
    """exp(l S0/2) rho exp(l S0/2) / Tr, with l chosen so that <S0> = target.

    A congruence by a positive diagonal matrix, so positivity and the
    inter-block coherence pattern survive.
    """
    N = rho.basis.photon_numbers.astype(float)
    with np.errstate(divide="ignore"):
        log_diag = np.log(np.maximum(np.real(np.diag(rho.matrix)), 0.0))

    def mean(l):
        logw = log_diag + l * N
        w = np.exp(logw - logw.max())
        return w @ N / w.sum()

    l = scipy.optimize.brentq(lambda l: mean(l) - target, -200.0, 200.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    d = np.exp(0.5 * l * (N - N.mean()))
    M = d[:, None] * rho.matrix * d[None, :]
    return DensityMatrix(rho.basis, M / np.trace(M).real)


def random_constellation(N: int, rng: np.random.Generator, min_separation: float = 0.0,
                         max_tries: int = 10000) -> Constellation:
    """Uniform stars on the sphere, resampled until every pair is ``min_separation`` apart."""
    for _ in range(max_tries):
        c = Constellation(N, tuple(random_direction(rng) for _ in range(N)))
        if c.min_separation() > min_separation:
            return c
    raise RuntimeError(f"no constellation with separation > {min_separation} after {max_tries} tries")

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qpolar.errors import (
    InconsistentStrategyError,
    NumericalError,
    UndefinedPolarizationError,
    ValidationError,
)
from qpolar.fock import DensityMatrix, PureState, TwoModeBasis
from qpolar.polarization import (
    StokesVector,
    TableRow,
    classical_decompose,
    classical_stokes,
    classify_perfect,
    counterexample_analysis,
    counterexample_state,
    decompose,
    degree_of_polarization,
    ensemble_from_sigma,
    p_from_subspaces,
    per_subspace,
    perfect_mixed_state,
    pure_decomposition_feasibility,
    stokes_vector,
    trace_distance,
)
from qpolar.randstate import random_density_matrix, random_psd, random_pure_state, tilt_to_mean
from qpolar.su2 import PolarizedPureSpec, polarized_pure_state, su2_coherent, unit_vector

complex_amp = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def ket(b, comps):
    return PureState.from_components(b, comps)


class TestClassical:
    def test_examples(self):
        assert classical_stokes(1, 0).as_tuple() == (1, 1, 0, 0)
        s = classical_stokes(1 / math.sqrt(2), 1 / math.sqrt(2)).as_tuple()
        assert s == pytest.approx((1, 0, 1, 0))
        s = classical_stokes(1 / math.sqrt(2), 1j / math.sqrt(2)).as_tuple()
        assert s == pytest.approx((1, 0, 0, 1))

    @given(complex_amp, complex_amp)
    def test_plane_wave_identity(self, a, b):
        if abs(a) + abs(b) < 1e-6:
            return
        s = classical_stokes(a, b)
        assert s.s0**2 == pytest.approx(s.magnitude**2, rel=1e-12, abs=1e-300)

    def test_zero_field(self):
        with pytest.raises(UndefinedPolarizationError):
            classical_stokes(0, 0)

    def test_decompose(self):
        pol, unp = classical_decompose(StokesVector(1, (1, 0, 0)))
        assert pol.as_tuple() == (1, 1, 0, 0) and unp.s0 == 0
        pol, unp = classical_decompose(StokesVector(2, (1, 0, 0)))
        assert pol.as_tuple() == (1, 1, 0, 0) and unp.as_tuple() == (1, 0, 0, 0)
        pol, unp = classical_decompose(StokesVector(1, (0.6, 0, 0.8)))
        assert pol.as_tuple() == pytest.approx((1, 0.6, 0, 0.8)) and unp.s0 == pytest.approx(0)
        with pytest.raises(UndefinedPolarizationError):
            classical_decompose(StokesVector(0, (0, 0, 0)))


class TestStokesAndDegree:
    def test_examples(self):
        b = TwoModeBasis(3)
        assert stokes_vector(ket(b, {(1, 0): 1})).as_tuple() == (1, 1, 0, 0)
        s = stokes_vector(ket(b, {(0, 3): 1, (2, 1): 1})).as_tuple()
        assert s == pytest.approx((3, -1, 0, 0), abs=1e-14)
        assert degree_of_polarization(su2_coherent(5, 1.0, 2.0, TwoModeBasis(5))) == pytest.approx(1, abs=1e-10)
        assert degree_of_polarization(ket(b, {(1, 1): 1})) == 0
        assert degree_of_polarization(ket(b, {(0, 0): 1})) is None

    def test_matches_oracle(self, rng):
        b = TwoModeBasis(6)
        for _ in range(20):
            psi = random_pure_state(b, rng)
            assert stokes_vector(psi).as_tuple() == pytest.approx(oracles.stokes_pure(oracles.to_dict(psi.amplitudes, 6)))
            rho = random_density_matrix(b, rng, rank=int(rng.integers(1, 5)))
            assert stokes_vector(rho).as_tuple() == pytest.approx(oracles.stokes_mixed(rho.matrix, 6))

    @given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.booleans())
    def test_p_at_most_one(self, seed, nmax, mixed):
        rng = np.random.default_rng(seed)
        b = TwoModeBasis(nmax)
        state = random_density_matrix(b, rng) if mixed else random_pure_state(b, rng)
        assert degree_of_polarization(state) <= 1 + 1e-10

    @pytest.mark.parametrize("N", range(1, 9))
    def test_fock_law(self, N):
        b = TwoModeBasis(N)
        for k in range(N + 1):
            p = degree_of_polarization(ket(b, {(k, N - k): 1}))
            assert p == abs(2 * k - N) / N
            assert (p == 1) == (k in (0, N))


class TestSubspaces:
    def test_two_block_example(self):
        sub = per_subspace(ket(TwoModeBasis(2), {(1, 0): 1, (0, 2): 1}), atol=1e-15)
        assert [(e.n, e.q) for e in sub.entries] == [(1, pytest.approx(0.5)), (2, pytest.approx(0.5))]
        assert sub.entries[0].vector == pytest.approx((1, 0, 0))
        assert sub.entries[1].vector == pytest.approx((-2, 0, 0))
        assert p_from_subspaces(sub) == pytest.approx(1 / 3)

    def test_single_block_reduces(self, rng):
        psi = random_pure_state(TwoModeBasis(4), rng, blocks=[4])
        (e,) = per_subspace(psi, atol=1e-15).entries
        assert p_from_subspaces(per_subspace(psi)) == pytest.approx(np.linalg.norm(e.vector) / 4)

    def test_aligned_blocks(self):
        psi = polarized_pure_state(PolarizedPureSpec(0.4, 1.0, ((1, 0.5, 0.0), (2, 0.5, 2.0))), TwoModeBasis(2))
        assert p_from_subspaces(per_subspace(psi)) == pytest.approx(1, abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_consistency(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_pure_state(TwoModeBasis(6), rng, blocks=sorted(set(rng.integers(1, 7, size=3).tolist())))
        assert abs(p_from_subspaces(per_subspace(psi)) - degree_of_polarization(psi)) < 1e-10


class TestPerfectMixed:
    def test_diagonal_sigma(self):
        b = TwoModeBasis(2)
        rho = perfect_mixed_state(np.diag([0.5, 0.5]), 0.0, 0.0, b, [1, 2])
        expected = np.zeros((b.dim, b.dim))
        expected[b.index(1, 0), b.index(1, 0)] = expected[b.index(2, 0), b.index(2, 0)] = 0.5
        assert np.allclose(rho.matrix, expected)
        assert degree_of_polarization(rho) == pytest.approx(1)

    def test_rank_one_sigma_is_pure_projector(self):
        b = TwoModeBasis(3)
        spec = PolarizedPureSpec(1.0, 2.0, ((1, 0.2, 0.5), (3, 0.8, 1.5)))
        lam = np.array([np.sqrt(0.2) * np.exp(0.5j), np.sqrt(0.8) * np.exp(1.5j)])
        rho = perfect_mixed_state(np.outer(lam, lam.conj()), 1.0, 2.0, b, [1, 3])
        assert np.allclose(rho.matrix, polarized_pure_state(spec, b).to_density_matrix().matrix, atol=1e-14)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 8))
    def test_random_sigma_perfect(self, seed, d):
        rng = np.random.default_rng(seed)
        sigma = random_psd(d, rng, rank=int(rng.integers(1, d + 1)))
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        rho = perfect_mixed_state(sigma, theta, phi, TwoModeBasis(8), list(range(1, d + 1)))
        assert abs(degree_of_polarization(rho) - 1) < 1e-9
        assert classify_perfect(rho).is_perfect

    def test_sigma_validation(self):
        b = TwoModeBasis(2)
        with pytest.raises(ValidationError):
            perfect_mixed_state(np.array([[0.5, 0.1], [0.2, 0.5]]), 0, 0, b)
        with pytest.raises(ValidationError):
            perfect_mixed_state(np.diag([1.5, -0.5]), 0, 0, b)
        with pytest.raises(ValidationError):
            perfect_mixed_state(np.diag([0.5, 0.4]), 0, 0, b)
        with pytest.raises(ValidationError):
            perfect_mixed_state(np.diag([0.5, 0.5]), 0, 0, b, [1, 1])


class TestEnsemble:
    def test_rank_one(self):
        lam = np.array([0.6, 0.8j])
        (v,) = ensemble_from_sigma(np.outer(lam, lam.conj()))
        assert abs(abs(np.vdot(v, lam)) - 1) < 1e-12

    def test_diagonal(self):
        vs = ensemble_from_sigma(np.diag([0.2, 0.0, 0.8]))
        assert len(vs) == 2
        assert [np.flatnonzero(v).tolist() for v in vs] == [[0], [2]]

    def test_reconstruction(self, rng):
        for d in range(1, 9):
            sigma = random_psd(d, rng, rank=int(rng.integers(1, d + 1)))
            rebuilt = sum(np.outer(v, v.conj()) for v in ensemble_from_sigma(sigma))
            assert np.max(np.abs(rebuilt - sigma)) < 1e-10

    def test_non_psd_rejected(self):
        with pytest.raises(ValidationError):
            ensemble_from_sigma(np.diag([1.0, -0.1]))


class TestClassify:
    def test_coherent_state(self):
        r = classify_perfect(su2_coherent(3, 2.0, 5.0, TwoModeBasis(4)))
        assert r.is_perfect and r.table_row is TableRow.PURE_FIXED_N
        assert r.residual_b_occupation < 1e-10
        assert np.allclose(unit_vector(*r.aligned_direction), unit_vector(2.0, 5.0))

    def test_indeterminate_n(self):
        psi = polarized_pure_state(PolarizedPureSpec(1.0, 1.0, ((1, 0.3, 0.0), (4, 0.7, 1.0))), TwoModeBasis(4))
        assert classify_perfect(psi).table_row is TableRow.PURE_INDETERMINATE_N

    def test_mixed_rows(self, rng):
        b = TwoModeBasis(4)
        diag = perfect_mixed_state(np.diag([0.3, 0.7]), 1.0, 1.0, b, [2, 4])
        assert classify_perfect(diag).table_row is TableRow.MIXED_DIAGONAL
        general = perfect_mixed_state(random_psd(3, rng), 1.0, 1.0, b, [1, 2, 4])
        assert classify_perfect(general).table_row is TableRow.MIXED_GENERAL

    def test_not_perfect(self):
        r = classify_perfect(ket(TwoModeBasis(2), {(1, 1): 1}))
        assert not r.is_perfect and r.p == 0 and r.table_row is TableRow.NOT_PERFECT

    def test_vacuum(self):
        r = classify_perfect(ket(TwoModeBasis(1), {(0, 0): 1}))
        assert r.p is None and not r.is_perfect

    def test_random_states_not_perfect(self, rng):
        b = TwoModeBasis(4)
        for _ in range(20):
            rho = random_density_matrix(b, rng)
            r = classify_perfect(rho)
            assert not r.is_perfect
            assert r.p == pytest.approx(oracles.degree(oracles.stokes_mixed(rho.matrix, 4)), abs=1e-10)


def _partially_polarized(rng, nmax=4):
    b = TwoModeBasis(nmax)
    return random_density_matrix(b, rng, rank=int(rng.integers(1, b.dim + 1)))


class TestDecompose:
    def test_hand_example(self):
        b = TwoModeBasis(1)
        rho = DensityMatrix(b, np.diag([0, 0.25, 0.75]).astype(complex))  # |0,1>, |1,0>
        r = decompose(rho, "fixed-n", fixed_n=1)
        assert r.p == pytest.approx(0.5)
        assert np.allclose(r.polarized.matrix, np.diag([0, 0, 1]))
        assert np.allclose(r.unpolarized.matrix, np.diag([0, 0.5, 0.5]))
        assert r.physical

    def test_perfect_input(self):
        rho = su2_coherent(2, 1.0, 1.0, TwoModeBasis(2)).to_density_matrix()
        r = decompose(rho)
        assert r.p == 1 and r.polarized is rho and r.unpolarized is None

    def test_unpolarized_input(self):
        r = decompose(ket(TwoModeBasis(2), {(1, 1): 1}))
        assert r.p == 0 and r.polarized is None and r.physical

    def test_vacuum(self):
        with pytest.raises(UndefinedPolarizationError):
            decompose(ket(TwoModeBasis(1), {(0, 0): 1}))

    @pytest.mark.parametrize("strategy", ["bracketed", "glauber"])
    def test_reconstruction(self, rng, strategy):
        for _ in range(15):
            rho = _partially_polarized(rng)
            r = decompose(rho, strategy)
            assert np.max(np.abs(r.reconstruct() - rho.matrix)) < 1e-9
            assert stokes_vector(r.unpolarized).magnitude < 1e-9
            assert stokes_vector(r.polarized).s0 == pytest.approx(stokes_vector(rho).s0, abs=1e-10)
            assert degree_of_polarization(r.polarized) == pytest.approx(1, abs=1e-10)
            assert np.trace(r.unpolarized.matrix).real == pytest.approx(1, abs=1e-12)

    def test_fixed_n_needs_integer_mean(self, rng):
        rho = tilt_to_mean(_partially_polarized(rng), 2.0)
        r = decompose(rho, "fixed-n", fixed_n=2)
        assert np.max(np.abs(r.reconstruct() - rho.matrix)) < 1e-9
        with pytest.raises(InconsistentStrategyError):
            decompose(rho, "fixed-n", fixed_n=3)
        with pytest.raises(ValidationError):
            decompose(rho, "fixed-n")

    def test_non_uniqueness(self, rng):
        rho = _partially_polarized(rng)
        a, g = decompose(rho, "bracketed"), decompose(rho, "glauber")
        assert trace_distance(a.polarized, g.polarized) > 1e-3
        for r in (a, g):
            assert np.max(np.abs(r.reconstruct() - rho.matrix)) < 1e-9

    def test_glauber_mean_out_of_range(self):
        b = TwoModeBasis(1)
        rho = DensityMatrix(b, np.diag([0, 0.1, 0.9]).astype(complex))  # S0 = 1 = nmax
        with pytest.raises(NumericalError):
            decompose(rho, "glauber")

    def test_unknown_strategy(self, rng):
        with pytest.raises(ValidationError):
            decompose(_partially_polarized(rng), "greedy")


class TestFeasibility:
    def test_counterexample_n3_reference_frame(self):
        psi = counterexample_state(3)
        r = pure_decomposition_feasibility(psi, {3: 1.0}, direction=(0.0, 0.0))
        expected = math.sqrt(1.5) * np.array([0, 1, -1j])
        assert np.max(np.abs(np.array(r.overlap) - expected)) < 1e-12
        assert r.coplanarity_normalized == pytest.approx(1, abs=1e-12)
        assert r.status == "infeasible"
        # the minimum over the remainder is p = 1/sqrt(10), reached at alpha = 1/3
        assert r.min_p_remainder == pytest.approx(1 / math.sqrt(10), abs=1e-6)

    def test_coherent_state_degenerate(self):
        r = pure_decomposition_feasibility(su2_coherent(3, 1.0, 2.0, TwoModeBasis(3)))
        assert r.status == "degenerate-feasible" and r.feasible

    def test_zero_stokes_vector(self):
        r = pure_decomposition_feasibility(ket(TwoModeBasis(2), {(2, 0): 1, (0, 2): 1}))
        assert r.status == "already-unpolarized"

    def test_own_direction_feasible_for_n3(self):
        r = pure_decomposition_feasibility(counterexample_state(3), {3: 1.0})
        assert r.status == "feasible"
        assert r.min_p_remainder < 1e-6

    def test_analysis_caveats(self):
        a2 = counterexample_analysis(2)
        assert any("S2" in c for c in a2.caveats)
        assert a2.stokes.vector == pytest.approx((-1, math.sqrt(2), 0))
        a3 = counterexample_analysis(3)
        assert a3.reference_frame.status == "infeasible"
        assert any("negative" in c for c in a3.caveats)
        with pytest.raises(ValidationError):
            counterexample_state(1)

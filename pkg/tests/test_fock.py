import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpolar.errors import BasisMismatchError, CutoffExceededError, InvalidStateError, ValidationError
from qpolar.fock import (
    DensityMatrix,
    OperatorMatrix,
    PureState,
    TwoModeBasis,
    basis_index,
    basis_label,
    expectation,
    expectation_real,
    ladder_operators,
    stokes_operators,
    validate,
)
from qpolar.tolerance import current, tolerances


def comm(x, y):
    return x @ y - y @ x


def ket(basis, m, n):
    return PureState.from_components(basis, {(m, n): 1.0})


class TestBasis:
    def test_index_examples(self):
        b = TwoModeBasis(3)
        assert basis_index(0, 0, b) == 0
        assert basis_index(0, 1, b) == 1
        assert basis_index(1, 0, b) == 2
        assert basis_label(5, b) == (2, 0)

    @given(st.integers(0, 40))
    def test_dimension_and_bijection(self, nmax):
        b = TwoModeBasis(nmax)
        assert b.dim == (nmax + 1) * (nmax + 2) // 2
        assert [b.index(*b.label(i)) for i in range(b.dim)] == list(range(b.dim))
        assert len(set(b.labels)) == b.dim

    def test_blocks_are_contiguous_and_ordered(self):
        b = TwoModeBasis(6)
        prev_stop = 0
        for N, s in b.blocks():
            assert s.start == prev_stop
            assert [b.label(i) for i in range(s.start, s.stop)] == [(m, N - m) for m in range(N + 1)]
            prev_stop = s.stop
        assert prev_stop == b.dim

    def test_cutoff_errors(self):
        b = TwoModeBasis(2)
        with pytest.raises(CutoffExceededError):
            b.index(2, 1)
        with pytest.raises(CutoffExceededError):
            b.index(-1, 0)
        with pytest.raises(CutoffExceededError):
            b.label(b.dim)
        with pytest.raises(ValidationError):
            TwoModeBasis(-1)


class TestLadder:
    def test_action_on_kets(self):
        b = TwoModeBasis(3)
        L = ladder_operators(b)
        v = L["a"].matrix @ ket(b, 1, 0).amplitudes
        assert v[b.index(0, 0)] == pytest.approx(1.0)
        v = L["a_dag"].matrix @ ket(b, 1, 0).amplitudes
        assert v[b.index(2, 0)] == pytest.approx(math.sqrt(2))
        v = L["b"].matrix @ ket(b, 1, 2).amplitudes
        assert v[b.index(1, 1)] == pytest.approx(math.sqrt(2))

    def test_adjointness(self):
        L = ladder_operators(TwoModeBasis(5))
        assert np.array_equal(L["a_dag"].matrix, L["a"].matrix.conj().T)
        assert np.array_equal(L["b_dag"].matrix, L["b"].matrix.conj().T)

    def test_canonical_commutator_below_top_block(self):
        b = TwoModeBasis(5)
        L = ladder_operators(b)
        c = comm(L["a"].matrix, L["a_dag"].matrix)
        below = b.photon_numbers < b.nmax
        assert np.allclose(c[np.ix_(below, below)], np.eye(below.sum()), atol=1e-14)
        top = ~below
        assert not np.allclose(c[np.ix_(top, top)], np.eye(top.sum()))


class TestStokes:
    def test_actions(self):
        b = TwoModeBasis(2)
        S0, S1, S2, S3 = (op.matrix for op in stokes_operators(b))
        assert (S1 @ ket(b, 1, 0).amplitudes)[b.index(1, 0)] == pytest.approx(1)
        assert (S1 @ ket(b, 0, 1).amplitudes)[b.index(0, 1)] == pytest.approx(-1)
        out = S2 @ ket(b, 1, 0).amplitudes
        assert out[b.index(0, 1)] == pytest.approx(1)
        assert np.count_nonzero(np.abs(out) > 1e-15) == 1

    @pytest.mark.parametrize("nmax", [0, 1, 4, 9])
    def test_hermitian_block_diagonal_and_s0(self, nmax):
        b = TwoModeBasis(nmax)
        ops = stokes_operators(b)
        cross = b.photon_numbers[:, None] != b.photon_numbers[None, :]
        for op in ops:
            assert op.hermitian
            assert np.array_equal(op.matrix, op.matrix.conj().T)
            assert not np.any(op.matrix[cross])
        assert np.allclose(ops[0].matrix, np.diag(b.photon_numbers))

    def test_casimir_and_commutators(self):
        b = TwoModeBasis(8)
        S0, S1, S2, S3 = (op.matrix for op in stokes_operators(b))
        assert np.allclose(S1 @ S1 + S2 @ S2 + S3 @ S3, S0 @ S0 + 2 * S0, atol=1e-12)
        assert np.allclose(comm(S1, S2), 2j * S3, atol=1e-12)
        assert np.allclose(comm(S2, S3), 2j * S1, atol=1e-12)
        assert np.allclose(comm(S3, S1), 2j * S2, atol=1e-12)
        for S in (S1, S2, S3):
            assert np.allclose(comm(S0, S), 0, atol=1e-12)


class TestExpectation:
    def test_examples(self):
        b = TwoModeBasis(2)
        S0, S1, S2, S3 = stokes_operators(b)
        assert expectation_real(S0, ket(b, 2, 0)) == pytest.approx(2)
        diag = PureState.from_components(b, {(1, 0): 1, (0, 1): 1})
        assert expectation_real(S2, diag) == pytest.approx(1)
        circ = PureState.from_components(b, {(1, 0): 1, (0, 1): 1j})
        assert expectation_real(S3, circ) == pytest.approx(1)

    def test_density_matrix_matches_pure(self, rng):
        b = TwoModeBasis(3)
        psi = PureState(b, rng.normal(size=b.dim) + 1j * rng.normal(size=b.dim))
        for op in stokes_operators(b):
            assert expectation(op, psi) == pytest.approx(expectation(op, psi.to_density_matrix()), abs=1e-13)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatchError):
            expectation(stokes_operators(TwoModeBasis(2))[0], ket(TwoModeBasis(3), 1, 0))

    def test_imaginary_part_rejected_by_real_variant(self):
        b = TwoModeBasis(1)
        op = OperatorMatrix(b, 1j * np.eye(b.dim))
        with pytest.raises(ValueError):
            expectation_real(op, ket(b, 1, 0))


class TestContainersAndValidate:
    def test_pure_normalization(self):
        b = TwoModeBasis(2)
        psi = PureState(b, np.arange(b.dim, dtype=complex))
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1, abs=1e-15)
        assert validate(psi).ok
        assert validate(psi).norm_residual < 1e-12
        with pytest.raises(InvalidStateError):
            PureState(b, np.zeros(b.dim))
        with pytest.raises(BasisMismatchError):
            PureState(b, np.ones(3))

    def test_amplitudes_are_read_only(self):
        psi = ket(TwoModeBasis(1), 1, 0)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 1

    def test_trace_flagged(self):
        rho = np.diag([0.5, 0.4, 0.0]).astype(complex)
        r = validate(rho)
        assert r.trace_residual == pytest.approx(0.1)
        assert "trace" in r.problems
        with pytest.raises(InvalidStateError):
            DensityMatrix(TwoModeBasis(1), rho)

    def test_projector(self):
        rho = ket(TwoModeBasis(2), 1, 1).to_density_matrix()
        r = validate(rho)
        assert r.ok
        assert r.min_eigenvalue == pytest.approx(0, abs=1e-14)
        assert r.purity == pytest.approx(1)

    def test_non_hermitian_and_negative_rejected(self):
        b = TwoModeBasis(1)
        m = np.diag([0.5, 0.5, 0]).astype(complex)
        m[0, 1] = 0.1
        with pytest.raises(InvalidStateError):
            DensityMatrix(b, m)
        neg = np.diag([1.2, -0.2, 0]).astype(complex)
        with pytest.raises(InvalidStateError):
            DensityMatrix(b, neg)
        assert "positivity" in validate(neg).problems
        DensityMatrix(b, neg, check_positive=False)

    def test_tolerance_context(self):
        assert current().trace == 1e-12
        rho = np.diag([0.5, 0.5 + 1e-10, 0]).astype(complex)
        with pytest.raises(InvalidStateError):
            DensityMatrix(TwoModeBasis(1), rho)
        with tolerances(trace=1e-9):
            assert current().trace == 1e-9
            DensityMatrix(TwoModeBasis(1), rho)
        assert current().trace == 1e-12

import math

import numpy as np
import pytest

from qadder import (
    DegenerateStateError,
    DensityOperator,
    DimensionMismatchError,
    LinearOperator,
    NotPSDError,
    StateVector,
    fidelity,
    matrix_sqrt_psd,
    normalize,
    overlap,
    partial_trace,
    tensor_product,
    trace_distance,
)

from conftest import make_rng, random_density, random_pure_density

S2 = math.sqrt(2.0)


def ket(*amps):
    return StateVector((2,), np.array(amps, dtype=complex))


H = ket(1, 0)
V = ket(0, 1)
PLUS = ket(1 / S2, 1 / S2)
MINUS = ket(1 / S2, -1 / S2)


class TestStateVector:
    def test_length_must_match_dims(self):
        with pytest.raises(ValueError):
            StateVector((2, 2), np.zeros(3, dtype=complex))

    def test_amplitudes_are_read_only(self):
        s = ket(1, 0)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 5.0

    def test_density_of_pure_state(self):
        rho = PLUS.density()
        assert np.allclose(rho.matrix, np.full((2, 2), 0.5))

    def test_density_of_zero_vector_fails(self):
        with pytest.raises(DegenerateStateError):
            StateVector((2,), np.zeros(2, dtype=complex)).density()


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityOperator((2,), np.array([[0.5, 1.0], [0.0, 0.5]], dtype=complex))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityOperator((2,), np.eye(2, dtype=complex))

    def test_unnormalized_flag_skips_trace_check(self):
        DensityOperator((2,), np.eye(2, dtype=complex), normalized=False)

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPSDError):
            DensityOperator((2,), np.diag([1.5, -0.5]).astype(complex))

    def test_tolerates_psd_slack(self):
        DensityOperator((2,), np.diag([1.0 + 5e-11, -5e-11]).astype(complex))


class TestLinearOperator:
    def test_shape_must_match_dims(self):
        with pytest.raises(ValueError):
            LinearOperator((2,), (2, 2), np.eye(2, dtype=complex))

    def test_rectangular_map(self):
        op = LinearOperator((2, 2), (2,), np.zeros((2, 4), dtype=complex))
        assert op.matrix.shape == (2, 4)


class TestTensorProduct:
    def test_basis_product(self):
        prod = tensor_product(H, H)
        assert prod.dims == (2, 2)
        assert np.allclose(prod.amplitudes, [1, 0, 0, 0])

    def test_plus_times_h(self):
        prod = tensor_product(PLUS, H)
        assert np.allclose(prod.amplitudes, [1 / S2, 0, 1 / S2, 0])

    def test_identity_operators(self):
        eye2 = LinearOperator((2,), (2,), np.eye(2, dtype=complex))
        prod = tensor_product(eye2, eye2)
        assert prod.in_dims == (2, 2)
        assert np.allclose(prod.matrix, np.eye(4))

    def test_norm_is_multiplicative(self, rng):
        a = StateVector((2,), rng.normal(size=2) + 1j * rng.normal(size=2))
        b = StateVector((3,), rng.normal(size=3) + 1j * rng.normal(size=3))
        assert tensor_product(a, b).norm() == pytest.approx(a.norm() * b.norm())

    def test_density_product(self, rng):
        a = random_density(2, rng)
        b = random_density(2, rng)
        prod = tensor_product(a, b)
        assert prod.dims == (2, 2)
        assert np.trace(prod.matrix).real == pytest.approx(1.0)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(TypeError):
            tensor_product(H, H.density())


class TestPartialTrace:
    def test_bell_state_reduces_to_maximally_mixed(self):
        bell = StateVector((2, 2), np.array([1, 0, 0, 1], dtype=complex) / S2)
        for keep in ((0,), (1,)):
            red = partial_trace(bell.density(), keep)
            assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state_reduces_to_factor(self, rng):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        psi = StateVector((2,), v)
        joint = tensor_product(psi, PLUS).density()
        red = partial_trace(joint, (0,))
        assert np.allclose(red.matrix, psi.density().matrix, atol=1e-12)

    def test_balanced_swap_superposition_reduces_to_diag_half(self):
        # (|HV> + |VH>)/sqrt(2): either factor traces to diag(1/2, 1/2).
        state = StateVector((2, 2), np.array([0, 1, 1, 0], dtype=complex) / S2)
        red = partial_trace(state.density(), (0,))
        assert np.allclose(red.matrix, np.diag([0.5, 0.5]), atol=1e-12)

    def test_roundtrip_with_tensor_product(self, rng):
        for _ in range(50):
            a = random_density(2, rng)
            b = random_density(2, rng)
            red = partial_trace(tensor_product(a, b), (0,))
            assert np.max(np.abs(red.matrix - a.matrix)) < 1e-12

    def test_trace_preserved(self, rng):
        rho = random_density(8, rng)
        red = partial_trace(rho, (0, 2))
        assert np.trace(red.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert red.dims == (2, 2)

    def test_index_out_of_range(self, rng):
        with pytest.raises(IndexError):
            partial_trace(random_density(4, rng), (5,))

    def test_empty_keep_rejected(self, rng):
        with pytest.raises(ValueError):
            partial_trace(random_density(4, rng), ())


class TestMatrixSqrtPsd:
    def test_identity(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(3, dtype=complex)), np.eye(3))

    def test_diagonal(self):
        root = matrix_sqrt_psd(np.diag([4.0, 9.0]).astype(complex))
        assert np.allclose(root, np.diag([2.0, 3.0]))

    def test_square_reproduces_input(self, rng):
        for _ in range(50):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            m = a @ a.conj().T
            root = matrix_sqrt_psd(m)
            assert np.linalg.norm(root @ root - m) < 1e-9 * max(1.0, np.linalg.norm(m))

    def test_small_negative_eigenvalue_clamped(self):
        root = matrix_sqrt_psd(np.diag([1.0, -5e-9]).astype(complex))
        assert np.allclose(root, np.diag([1.0, 0.0]))

    def test_large_negative_eigenvalue_rejected(self):
        with pytest.raises(NotPSDError):
            matrix_sqrt_psd(np.diag([1.0, -1e-6]).astype(complex))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex))


class TestFidelity:
    def test_self_fidelity_is_one(self, rng):
        for _ in range(20):
            rho = random_density(2, rng)
            assert abs(fidelity(rho, rho) - 1.0) < 1e-12

    def test_orthogonal_pure_states(self):
        assert fidelity(H.density(), V.density()) == pytest.approx(0.0, abs=1e-12)

    def test_h_against_plus(self):
        assert fidelity(H.density(), PLUS.density()) == pytest.approx(0.5, abs=1e-12)

    def test_symmetric(self, rng):
        for _ in range(20):
            rho = random_density(4, rng)
            sigma = random_density(4, rng)
            assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-10)

    def test_pure_sigma_reduces_to_expectation(self, rng):
        for _ in range(20):
            rho = random_density(2, rng)
            sigma = random_pure_density(2, rng)
            direct = np.trace(rho.matrix @ sigma.matrix).real
            assert fidelity(rho, sigma) == pytest.approx(direct, abs=1e-10)

    def test_pure_pure_is_squared_overlap(self, rng):
        for _ in range(1000):
            x = rng.normal(size=2) + 1j * rng.normal(size=2)
            y = rng.normal(size=2) + 1j * rng.normal(size=2)
            x /= np.linalg.norm(x)
            y /= np.linalg.norm(y)
            f = fidelity(
                DensityOperator((2,), np.outer(x, x.conj())),
                DensityOperator((2,), np.outer(y, y.conj())),
            )
            assert abs(f - abs(np.vdot(y, x)) ** 2) < 1e-10

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            fidelity(random_density(2, rng), random_density(4, rng))


class TestTraceDistance:
    def test_self_distance_is_zero(self, rng):
        rho = random_density(4, rng)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_states(self):
        assert trace_distance(H.density(), V.density()) == pytest.approx(1.0, abs=1e-12)

    def test_h_against_plus(self):
        expected = 1.0 / S2
        assert trace_distance(H.density(), PLUS.density()) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            trace_distance(random_density(2, rng), random_density(4, rng))


class TestMetricRelations:
    def test_fuchs_van_de_graaf(self):
        rng = make_rng(11)
        for dim in (2, 4):
            for _ in range(1000):
                rho = random_density(dim, rng)
                sigma = random_density(dim, rng)
                f = fidelity(rho, sigma)
                d = trace_distance(rho, sigma)
                assert 1.0 - math.sqrt(f) <= d + 1e-9
                assert d <= math.sqrt(1.0 - f) + 1e-9

    def test_pure_pairs_saturate_upper_bound(self):
        rng = make_rng(13)
        for _ in range(500):
            rho = random_pure_density(2, rng)
            sigma = random_pure_density(2, rng)
            f = fidelity(rho, sigma)
            d = trace_distance(rho, sigma)
            assert abs(d - math.sqrt(max(0.0, 1.0 - f))) < 1e-10


class TestOverlap:
    def test_identical(self):
        assert overlap(H, H) == pytest.approx(1.0)

    def test_orthogonal_equator_states(self):
        assert abs(overlap(MINUS, PLUS)) < 1e-12

    def test_weighted_pair(self):
        left = ket(math.sqrt(2) / math.sqrt(3), 1 / math.sqrt(3))
        expected = (math.sqrt(2) + 1) / math.sqrt(6)
        assert overlap(left, PLUS) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.98560, abs=5e-6)

    def test_conjugate_symmetry(self, rng):
        for _ in range(20):
            x = StateVector((2,), rng.normal(size=2) + 1j * rng.normal(size=2))
            y = StateVector((2,), rng.normal(size=2) + 1j * rng.normal(size=2))
            assert overlap(x, y) == pytest.approx(np.conj(overlap(y, x)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            overlap(H, StateVector((2, 2), np.zeros(4, dtype=complex)))


class TestNormalize:
    def test_simple(self):
        unit, n = normalize(ket(2, 0))
        assert n == pytest.approx(2.0)
        assert np.allclose(unit.amplitudes, [1, 0])

    def test_balanced(self):
        unit, n = normalize(ket(1, 1))
        assert n == pytest.approx(S2)
        assert np.allclose(unit.amplitudes, [1 / S2, 1 / S2])

    def test_weighted(self):
        # Unnormalized machine output for the (|H>, |+>) input pair.
        unit, n = normalize(ket(math.sqrt(2), 1 / math.sqrt(2)))
        assert n == pytest.approx(math.sqrt(2.5), abs=1e-12)
        assert np.allclose(unit.amplitudes, [0.8944271909999159, 0.4472135954999579])

    def test_zero_vector(self):
        with pytest.raises(DegenerateStateError):
            normalize(ket(0, 0))

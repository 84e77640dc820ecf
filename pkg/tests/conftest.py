import numpy as np
import pytest

from qadder import DensityOperator, Qubit
from qadder.protocol import ControlQubit


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_qubit(rng: np.random.Generator) -> Qubit:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return Qubit(v[0], v[1])


def random_control(rng: np.random.Generator) -> ControlQubit:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return ControlQubit(v[0], v[1])


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    m /= np.trace(m).real
    dims = (2,) * int(np.log2(dim)) if dim in (2, 4, 8) else (dim,)
    return DensityOperator(dims, m)


def random_pure_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    dims = (2,) * int(np.log2(dim)) if dim in (2, 4, 8) else (dim,)
    return DensityOperator(dims, np.outer(v, v.conj()))


def phase_aligned_error(u: np.ndarray, v: np.ndarray) -> float:
    """Max elementwise deviation after aligning the global phase of v to u."""
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    inner = np.vdot(u, v)
    if abs(inner) > 1e-300:
        v = v * (inner.conjugate() / abs(inner))
    return float(np.max(np.abs(u - v)))


def assert_states_match(u, v, tol: float = 1e-10):
    err = phase_aligned_error(u, v)
    assert err <= tol, f"states differ by {err} after phase alignment"


def qubits_match(q1: Qubit, q2: Qubit, tol: float = 1e-10) -> bool:
    return phase_aligned_error(q1.vector(), q2.vector()) <= tol


@pytest.fixture
def rng():
    return make_rng(20240817)

"""Dense complex linear algebra over small multi-factor Hilbert spaces.

States and operators carry an explicit tuple of tensor-factor dimensions so
that multi-photon bookkeeping (Kronecker products, partial traces, factor
projections) stays index-safe.  Everything here is desk scale (total
dimension <= a few hundred) and dense; a Hermitian eigendecomposition is the
single numerical kernel behind the matrix square root, the fidelity and the
trace distance.

All values are immutable after construction and safe to share across
threads; every operation is a pure function.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_SLACK = 1e-10
SQRT_EIG_FLOOR = -1e-8
ZERO_NORM_TOL = 1e-12


class DimensionMismatchError(ValueError):
    """Operands live on different factor spaces."""


class NotPSDError(ValueError):
    """Matrix has an eigenvalue below the allowed negative slack."""


class DegenerateStateError(ValueError):
    """A numerically zero vector cannot be normalized."""


def _frozen_complex(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d complex array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state over an ordered tuple of tensor factors.

    ``amplitudes`` is the flattened coefficient vector in row-major factor
    order: the basis index of factor 0 is the most significant digit.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid factor dimensions {dims}")
        amps = _frozen_complex(self.amplitudes, ndim=1)
        if len(amps) != prod(dims):
            raise ValueError(
                f"{len(amps)} amplitudes do not fill factor space {dims}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = ZERO_NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per factor (read-only view)."""
        return self.amplitudes.reshape(self.dims)

    def density(self) -> "DensityOperator":
        """Projector |psi><psi| of the normalized state."""
        n2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if n2 < ZERO_NORM_TOL**2:
            raise DegenerateStateError("cannot form the projector of a zero vector")
        return DensityOperator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()) / n2)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive-semidefinite operator over ordered tensor factors.

    Validity (Hermiticity within 1e-10, eigenvalues >= -1e-10, unit trace
    within 1e-10 when ``normalized``) is checked at construction; slightly
    negative eigenvalues within the slack are tolerated because sampled
    tomography data produces them.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = _frozen_complex(self.matrix, ndim=2)
        d = prod(dims)
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match factors {dims}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        if self.normalized and abs(np.trace(mat).real - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"trace {np.trace(mat).real} is not 1 within tolerance")
        if np.min(np.linalg.eigvalsh(mat)) < -PSD_SLACK:
            raise NotPSDError("matrix has an eigenvalue below the PSD slack")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """General linear map between factor spaces, stored as a dense matrix."""

    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        in_dims = tuple(int(d) for d in self.in_dims)
        out_dims = tuple(int(d) for d in self.out_dims)
        mat = _frozen_complex(self.matrix, ndim=2)
        if mat.shape != (prod(out_dims), prod(in_dims)):
            raise ValueError(
                f"matrix shape {mat.shape} does not match {out_dims} <- {in_dims}"
            )
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        object.__setattr__(self, "matrix", mat)


def tensor_product(a, b):
    """Kronecker product of two values of the same kind.

    Factor dimensions concatenate, so the left operand's factors become the
    leading (most significant) indices of the result.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(
            a.dims + b.dims,
            np.kron(a.matrix, b.matrix),
            normalized=a.normalized and b.normalized,
        )
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        return LinearOperator(
            a.in_dims + b.in_dims, a.out_dims + b.out_dims, np.kron(a.matrix, b.matrix)
        )
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out every factor not listed in ``keep`` (indices, any order)."""
    keep = sorted(set(int(k) for k in keep))
    n = len(rho.dims)
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"factor index out of range for {n} factors: {keep}")
    dims = list(rho.dims)
    t = rho.matrix.reshape(dims + dims)
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + len(dims))
        dims.pop(idx)
    d = prod(dims)
    return DensityOperator(tuple(dims), t.reshape(d, d), normalized=rho.normalized)


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def matrix_sqrt_psd(m) -> np.ndarray:
    """Hermitian square root of a PSD matrix via eigendecomposition.

    Eigenvalues in [-1e-8, 0) are clamped to zero (tomography noise routinely
    produces them); anything below that raises :class:`NotPSDError`.
    """
    mat = m.matrix if isinstance(m, DensityOperator) else np.asarray(m, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(_hermitian_part(mat))
    if np.min(w) < SQRT_EIG_FLOOR:
        raise NotPSDError(f"eigenvalue {np.min(w)} below clamp threshold")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return _hermitian_part(root)


def _check_same_dims(rho: DensityOperator, sigma: DensityOperator):
    if rho.dims != sigma.dims:
        raise DimensionMismatchError(f"{rho.dims} vs {sigma.dims}")


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2 in [0, 1]."""
    _check_same_dims(rho, sigma)
    s = matrix_sqrt_psd(rho)
    w = np.linalg.eigvalsh(_hermitian_part(s @ sigma.matrix @ s))
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of rho - sigma, in [0, 1]."""
    _check_same_dims(rho, sigma)
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    d = float(0.5 * np.sum(np.abs(w)))
    return min(max(d, 0.0), 1.0)


def overlap(psi: StateVector, phi: StateVector) -> complex:
    """Inner product <psi|phi> (left argument conjugated)."""
    if psi.dims != phi.dims:
        raise DimensionMismatchError(f"{psi.dims} vs {phi.dims}")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def normalize(psi: StateVector) -> tuple[StateVector, float]:
    """Unit-norm copy of ``psi`` together with the original norm."""
    n = psi.norm()
    if n < ZERO_NORM_TOL:
        raise DegenerateStateError(f"norm {n} below {ZERO_NORM_TOL}")
    return StateVector(psi.dims, psi.amplitudes / n), n

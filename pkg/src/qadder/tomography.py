"""Single-qubit state tomography on simulated photon counts.

Measurements use the overcomplete six-projector scheme {H, V, D, A, R, L}
(one basis per Pauli axis, both outcomes counted).  Reconstruction is either
direct Stokes inversion -- exact on exact frequencies but possibly unphysical
on noisy counts -- or maximum-likelihood estimation over the physical set via
the factorization rho = T^dagger T / Tr(T^dagger T), which guarantees a
positive-semidefinite unit-trace estimate.  Error bars come from a
multinomial bootstrap of the observed frequencies.

Basis conventions (fixing all Stokes signs):
    D = (|H> + |V>)/sqrt(2)    A = (|H> - |V>)/sqrt(2)     x axis
    R = (|H> + i|V>)/sqrt(2)   L = (|H> - i|V>)/sqrt(2)    y axis
    H, V                                                   z axis
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import DensityOperator, fidelity, trace_distance
from .noise import RandomSource, sample_counts
from .protocol import Qubit

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

_S2 = math.sqrt(2.0)
_KETS = {
    "H": np.array([1.0, 0.0], dtype=np.complex128),
    "V": np.array([0.0, 1.0], dtype=np.complex128),
    "D": np.array([1.0 / _S2, 1.0 / _S2], dtype=np.complex128),
    "A": np.array([1.0 / _S2, -1.0 / _S2], dtype=np.complex128),
    "R": np.array([1.0 / _S2, 1.0j / _S2], dtype=np.complex128),
    "L": np.array([1.0 / _S2, -1.0j / _S2], dtype=np.complex128),
}


def _projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """One analysis basis: a label and its two rank-1 projectors."""

    basis: str
    projectors: tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        p, q = self.projectors
        if not np.allclose(p + q, np.eye(2), atol=1e-12):
            raise ValueError(f"projectors of basis {self.basis} do not sum to identity")
        for m in (p, q):
            if not np.allclose(m @ m, m, atol=1e-12):
                raise ValueError(f"projector of basis {self.basis} is not idempotent")


MEASUREMENT_SETTINGS = (
    MeasurementSetting("Z", (_projector(_KETS["H"]), _projector(_KETS["V"]))),
    MeasurementSetting("X", (_projector(_KETS["D"]), _projector(_KETS["A"]))),
    MeasurementSetting("Y", (_projector(_KETS["R"]), _projector(_KETS["L"]))),
)

_JSON_KEYS = ("n_H", "n_V", "n_D", "n_A", "n_R", "n_L")


@dataclass(frozen=True)
class CountsRecord:
    """Outcome counts of the six projectors, one fixed total per basis."""

    n_h: int
    n_v: int
    n_d: int
    n_a: int
    n_r: int
    n_l: int

    def __post_init__(self):
        for name in ("n_h", "n_v", "n_d", "n_a", "n_r", "n_l"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total_z(self) -> int:
        return self.n_h + self.n_v

    @property
    def total_x(self) -> int:
        return self.n_d + self.n_a

    @property
    def total_y(self) -> int:
        return self.n_r + self.n_l

    def by_basis(self) -> dict[str, tuple[int, int]]:
        return {"Z": (self.n_h, self.n_v), "X": (self.n_d, self.n_a), "Y": (self.n_r, self.n_l)}

    def as_dict(self) -> dict[str, int]:
        return dict(zip(_JSON_KEYS, (self.n_h, self.n_v, self.n_d, self.n_a, self.n_r, self.n_l)))

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CountsRecord":
        missing = [k for k in _JSON_KEYS if k not in data]
        if missing:
            raise ValueError(f"counts record is missing fields {missing}")
        return cls(*(data[k] for k in _JSON_KEYS))

    @classmethod
    def from_json(cls, text: str) -> "CountsRecord":
        return cls.from_dict(json.loads(text))


class ReconstructionError(RuntimeError):
    """Likelihood maximization did not converge; carries the best iterate."""

    def __init__(self, message: str, best: np.ndarray):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Reconstructed state with its quality metrics against a pure target."""

    rho: np.ndarray
    method: str
    fidelity_to_target: float
    fidelity_std: float
    distance_to_target: float
    distance_std: float
    bootstrap_samples: int

    def __post_init__(self):
        if self.method not in ("linear", "mle"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.fidelity_std < 0.0 or self.distance_std < 0.0:
            raise ValueError("error bars must be nonnegative")


def simulate_measurements(
    rho: DensityOperator, shots_per_setting: int, rng: RandomSource
) -> CountsRecord:
    """Sample multinomial counts of all six projectors from Born probabilities."""
    if rho.dims != (2,):
        raise ValueError(f"expected a single-qubit state, got dims {rho.dims}")
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be at least 1")
    outcome = []
    for setting in MEASUREMENT_SETTINGS:
        p_plus = float(np.trace(setting.projectors[0] @ rho.matrix).real)
        p_plus = min(max(p_plus, 0.0), 1.0)
        outcome.extend(sample_counts([p_plus, 1.0 - p_plus], shots_per_setting, rng))
    return CountsRecord(*outcome)


def _stokes(counts: CountsRecord) -> np.ndarray:
    totals = (counts.total_x, counts.total_y, counts.total_z)
    if min(totals) < 1:
        raise ValueError("every basis needs at least one count for inversion")
    return np.array(
        [
            (counts.n_d - counts.n_a) / counts.total_x,
            (counts.n_r - counts.n_l) / counts.total_y,
            (counts.n_h - counts.n_v) / counts.total_z,
        ]
    )


def linear_inversion(counts: CountsRecord) -> np.ndarray:
    """Stokes reconstruction 1/2 (I + r . sigma) from count frequencies.

    Exact on exact frequencies, unit trace by construction, but the estimate
    may be unphysical (negative eigenvalue) for noisy counts; route those to
    :func:`mle_reconstruct`.
    """
    rx, ry, rz = _stokes(counts)
    return 0.5 * (np.eye(2, dtype=np.complex128) + rx * PAULI_X + ry * PAULI_Y + rz * PAULI_Z)


_PROJECTOR_STACK = np.stack([p for s in MEASUREMENT_SETTINGS for p in s.projectors])

_LIKELIHOOD_TOL = 1e-10  # improvement per count below which the ascent stops
_MAX_ITERATIONS = 10_000
_PROB_FLOOR = 1e-12


def _rho_from_params(t: np.ndarray) -> np.ndarray:
    upper = np.array([[t[0], t[2] + 1j * t[3]], [0.0, t[1]]], dtype=np.complex128)
    rho = upper.conj().T @ upper
    tr = float(np.trace(rho).real)
    if tr < _PROB_FLOOR:
        return np.eye(2, dtype=np.complex128) / 2.0
    return rho / tr


def _initial_params(counts: CountsRecord) -> np.ndarray:
    # Shrunk Stokes guess: always strictly positive, so Cholesky succeeds.
    r = np.zeros(3)
    pairs = (
        (counts.n_d, counts.n_a, 0),
        (counts.n_r, counts.n_l, 1),
        (counts.n_h, counts.n_v, 2),
    )
    for plus, minus, axis in pairs:
        tot = plus + minus
        if tot > 0:
            r[axis] = (plus - minus) / tot
    norm = np.linalg.norm(r)
    if norm > 0.98:
        r *= 0.98 / norm
    rho0 = 0.5 * (
        np.eye(2, dtype=np.complex128) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z
    )
    upper = np.linalg.cholesky(rho0).conj().T
    return np.array([upper[0, 0].real, upper[1, 1].real, upper[0, 1].real, upper[0, 1].imag])


def mle_reconstruct(counts: CountsRecord, callback=None) -> DensityOperator:
    """Maximum-likelihood estimate over physical states.

    Maximizes the multinomial log-likelihood of the six counts through the
    parameterization rho = T^dagger T / Tr(T^dagger T) (quasi-Newton ascent
    on the four real parameters of upper-triangular T).  Stops when the
    per-count log-likelihood improves by less than 1e-10 or after 10^4
    iterations; hitting the iteration budget raises
    :class:`ReconstructionError` with the best iterate attached.
    ``callback`` (if given) receives each accepted parameter iterate.
    """
    # Count order matches the projector stack: Z (H, V), X (D, A), Y (R, L).
    n = np.array(
        [counts.n_h, counts.n_v, counts.n_d, counts.n_a, counts.n_r, counts.n_l],
        dtype=float,
    )
    proj = _PROJECTOR_STACK
    total = float(n.sum())
    if total < 1:
        raise ValueError("counts record is empty")

    def nll(t):
        rho = _rho_from_params(t)
        p = np.einsum("kij,ji->k", proj, rho).real
        p = np.clip(p, _PROB_FLOOR, None)
        return -float(n @ np.log(p)) / total

    result = optimize.minimize(
        nll,
        _initial_params(counts),
        method="L-BFGS-B",
        callback=callback,
        options={"ftol": _LIKELIHOOD_TOL, "gtol": 1e-9, "maxiter": _MAX_ITERATIONS, "maxfun": 5 * _MAX_ITERATIONS},
    )
    rho = _rho_from_params(result.x)
    if result.status == 1:  # iteration/evaluation budget exhausted
        raise ReconstructionError(
            f"likelihood ascent did not converge within {_MAX_ITERATIONS} iterations",
            rho,
        )
    return DensityOperator((2,), rho)


def bootstrap_errors(
    counts: CountsRecord,
    target: Qubit,
    resamples: int,
    rng: RandomSource,
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Bootstrap mean and spread of fidelity and distance to a pure target.

    Each resample redraws every basis multinomially from the observed
    frequencies (same totals), reconstructs by maximum likelihood, and
    evaluates both metrics; returns ((fid mean, fid std), (dist mean,
    dist std)) with sample standard deviations.
    """
    if resamples < 2:
        raise ValueError("need at least two resamples for a standard deviation")
    sigma = target.state().density()
    fids, dists = [], []
    by_basis = counts.by_basis()
    for i in range(resamples):
        source = rng.derive("bootstrap", i)
        redrawn = []
        for basis in ("Z", "X", "Y"):
            plus, minus = by_basis[basis]
            tot = plus + minus
            if tot < 1:
                raise ValueError(f"basis {basis} has no counts to resample")
            redrawn.extend(sample_counts([plus / tot, minus / tot], tot, source))
        est = mle_reconstruct(CountsRecord(*redrawn))
        fids.append(fidelity(est, sigma))
        dists.append(trace_distance(est, sigma))
    fids = np.asarray(fids)
    dists = np.asarray(dists)
    return (
        (float(fids.mean()), float(fids.std(ddof=1))),
        (float(dists.mean()), float(dists.std(ddof=1))),
    )

"""Heralded probabilistic superposition of unknown polarization qubits.

The abstract machine: a control-SWAP entangles the two inputs with an
ancilla, the ancilla is projected onto (|0> + |1>)/sqrt(2), and photon 2 is
projected onto a referential state chi (|H> by default).  The surviving
photon-1 state is proportional to

    alpha * <chi|phi> * |psi>  +  beta * <chi|psi> * |phi>

and exists only when at least one of the two referential overlaps is
nonzero; the machine is heralded, never deterministic.

Probability bookkeeping: returned states are renormalized at every stage.
The reported ``norm_factor`` is the norm of the full projected amplitude
(ancilla and referential projections included), and ``success_prob`` is
``norm_factor**2 / 2`` -- the extra 1/2 is the heralding cost of the
post-selected entangling step, matching the interferometric implementation
in :mod:`qadder.circuit` number for number.

Outputs are canonicalized so that the first nonzero amplitude is real and
positive; all comparisons downstream are phase-insensitive.
"""

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .core import DegenerateStateError, StateVector

NORM_TOL = 1e-12
ZERO_SUCCESS_TOL = 1e-12

_SQRT2 = math.sqrt(2.0)


class ZeroSuccessError(ValueError):
    """The heralded projection chain has vanishing amplitude (no-go input)."""


def canonical_phase(vec: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    """Rotate a global phase so the first amplitude above ``tol`` is real > 0."""
    v = np.asarray(vec, dtype=np.complex128)
    for x in v:
        if abs(x) > tol:
            return v * (abs(x) / x)
    return v.copy()


@dataclass(frozen=True)
class Qubit:
    """Normalized polarization qubit a|H> + b|V>."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > NORM_TOL:
            raise ValueError(f"({a}, {b}) is not normalized within {NORM_TOL}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_amplitudes(cls, a: complex, b: complex) -> "Qubit":
        """Build a qubit from unnormalized amplitudes."""
        n = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if n < NORM_TOL:
            raise DegenerateStateError("zero amplitude pair")
        return cls(a / n, b / n)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "Qubit":
        """Qubit at Bloch angles (radians): cos(t/2)|H> + e^{i p} sin(t/2)|V>."""
        return cls(math.cos(theta / 2.0), math.sin(theta / 2.0) * np.exp(1j * phi))

    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=np.complex128)

    def state(self) -> StateVector:
        return StateVector((2,), self.vector())


@dataclass(frozen=True)
class ControlQubit:
    """Normalized ancilla alpha|0> + beta|1> steering the swap branch."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > NORM_TOL:
            raise ValueError(f"({a}, {b}) is not normalized within {NORM_TOL}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)


@dataclass(frozen=True)
class ReferentialState:
    """Fixed state both inputs must overlap for the projection to succeed."""

    chi: Qubit


H = Qubit(1.0, 0.0)
V = Qubit(0.0, 1.0)
PLUS = Qubit(1.0 / _SQRT2, 1.0 / _SQRT2)
MINUS = Qubit(1.0 / _SQRT2, -1.0 / _SQRT2)

BALANCED_CONTROL = ControlQubit(1.0 / _SQRT2, 1.0 / _SQRT2)
HORIZONTAL_REFERENTIAL = ReferentialState(H)


@dataclass(frozen=True)
class AdderOutcome:
    """Heralded output state with its norm factor and success probability."""

    state: Qubit
    norm_factor: float
    success_prob: float

    def __post_init__(self):
        if not 0.0 <= self.success_prob <= 1.0:
            raise ValueError(f"success probability {self.success_prob} out of range")
        if abs(self.success_prob - self.norm_factor**2 / 2.0) > 1e-12:
            raise ValueError("success probability is not norm_factor**2 / 2")


def control_swap(psi: Qubit, phi: Qubit, control: ControlQubit) -> StateVector:
    """Entangle the swap branch with the ancilla.

    Returns the three-factor state (photon 1, photon 2, control)
    alpha|psi>|phi>|0> + beta|phi>|psi>|1>.
    """
    arr = np.zeros((2, 2, 2), dtype=np.complex128)
    arr[:, :, 0] = control.alpha * np.outer(psi.vector(), phi.vector())
    arr[:, :, 1] = control.beta * np.outer(phi.vector(), psi.vector())
    return StateVector((2, 2, 2), arr.ravel())


def project_control(state3: StateVector) -> StateVector:
    """Contract the control factor with <0| + <1|.

    The 1/sqrt(2) amplitude of the balanced projector is deferred to the
    referential-projection stage, so the returned two-photon vector is
    alpha|psi>|phi> + beta|phi>|psi>, unnormalized.
    """
    if state3.dims != (2, 2, 2):
        raise ValueError(f"expected dims (2, 2, 2), got {state3.dims}")
    t = state3.tensor()
    return StateVector((2, 2), (t[:, :, 0] + t[:, :, 1]).ravel())


def project_referential(
    state2: StateVector, chi: ReferentialState = HORIZONTAL_REFERENTIAL
) -> AdderOutcome:
    """Project photon 2 onto chi and return the heralded photon-1 outcome.

    The norm factor folds in the deferred 1/sqrt(2) of the control
    projection; the success probability adds the 1/2 heralding cost of the
    entangling step, so success_prob == norm_factor**2 / 2.
    """
    if state2.dims != (2, 2):
        raise ValueError(f"expected dims (2, 2), got {state2.dims}")
    t = state2.tensor()
    v = t @ chi.chi.vector().conj()
    raw = float(np.linalg.norm(v))
    nf = raw / _SQRT2
    if nf < ZERO_SUCCESS_TOL:
        raise ZeroSuccessError(
            "zero overlap with referential state (or fully destructive interference)"
        )
    out = Qubit(*canonical_phase(v / raw))
    return AdderOutcome(out, nf, nf**2 / 2.0)


def superpose(
    psi: Qubit,
    phi: Qubit,
    control: ControlQubit = BALANCED_CONTROL,
    chi: ReferentialState = HORIZONTAL_REFERENTIAL,
) -> AdderOutcome:
    """Run the three-stage machine end to end."""
    return project_referential(project_control(control_swap(psi, phi, control)), chi)


def superpose_theta(psi: Qubit, phi: Qubit, theta: float) -> AdderOutcome:
    """Closed-form outcome of the interferometric machine at erasure angle theta.

    The output state is proportional to c*cos(theta)**2 |psi> +
    a*sin(theta)**2 |phi| with a = <H|psi>, c = <H|phi>, and the success
    probability is norm**2 / 2.  At theta = pi/4 this reduces to the
    balanced-control machine with referential |H>.
    """
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    v = phi.a * c2 * psi.vector() + psi.a * s2 * phi.vector()
    nf = float(np.linalg.norm(v))
    if nf < ZERO_SUCCESS_TOL:
        raise ZeroSuccessError(
            "zero overlap with referential state (or fully destructive interference)"
        )
    return AdderOutcome(Qubit(*canonical_phase(v / nf)), nf, nf**2 / 2.0)


def sequential_cswap_state(states: Sequence[Qubit]) -> StateVector:
    """Entangle n photons by chained control-SWAPs (1,k), k = 2..n.

    Each swap is steered by its own balanced ancilla; factors are ordered
    photons 1..n, then ancillas for the (1,2), (1,3), ... swaps.  Every
    single-swap branch carries equal weight (1/sqrt(2) per ancilla).
    """
    n = len(states)
    if n < 2:
        raise ValueError("need at least two input states")
    plus = np.array([1.0, 1.0], dtype=np.complex128) / _SQRT2
    factors = [q.vector() for q in states] + [plus] * (n - 1)
    arr = reduce(np.kron, factors).reshape((2,) * (2 * n - 1))
    for k in range(2, n + 1):
        ctrl_axis = n + (k - 2)
        keep = np.take(arr, 0, axis=ctrl_axis)
        swapped = np.swapaxes(np.take(arr, 1, axis=ctrl_axis), 0, k - 1)
        arr = np.stack([keep, swapped], axis=ctrl_axis)
    return StateVector((2,) * (2 * n - 1), arr.ravel())


def superpose_n(
    states: Sequence[Qubit], referentials: Sequence[ReferentialState]
) -> AdderOutcome:
    """Superpose n states: chained swaps, ancillas onto |+>, photons 2..n onto chi_k.

    The norm factor absorbs one 1/sqrt(2) heralding amplitude per swap beyond
    the first so that success_prob == norm_factor**2 / 2 holds for every n;
    the total probability is therefore ||amplitude||**2 / 2**(n-1).
    Reduces exactly to :func:`superpose` with a balanced control at n = 2.
    """
    n = len(states)
    if n < 2:
        raise ValueError("need at least two input states")
    if len(referentials) != n - 1:
        raise ValueError(f"need {n - 1} referential states, got {len(referentials)}")
    arr = sequential_cswap_state(states).tensor()
    plus_bra = np.array([1.0, 1.0], dtype=np.complex128).conj() / _SQRT2
    for axis in reversed(range(n, 2 * n - 1)):
        arr = np.tensordot(arr, plus_bra, axes=([axis], [0]))
    for k in reversed(range(1, n)):
        bra = referentials[k - 1].chi.vector().conj()
        arr = np.tensordot(arr, bra, axes=([k], [0]))
    phys = float(np.linalg.norm(arr))
    nf = phys / _SQRT2 ** (n - 2)
    if nf < ZERO_SUCCESS_TOL:
        raise ZeroSuccessError(
            "zero overlap with referential states (or fully destructive interference)"
        )
    return AdderOutcome(Qubit(*canonical_phase(arr / phys)), nf, nf**2 / 2.0)

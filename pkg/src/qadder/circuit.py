"""Polarization/path-encoded interferometric implementation of the machine.

The two-photon state lives on four factors ordered (path 1, pol 1, path 2,
pol 2).  Each ``path`` factor is the qubit spanned by the two rails of one
interferometer arm (logical 0/1 = upper/lower rail); each ``pol`` factor is
{|H>, |V>}.  Conventions, fixed so the staged states come out literally:

* The polarizing beam splitter transmits |H> and reflects |V> with no
  relative phase.
* Beam-displacer recombination (with the 45 deg half-wave plates and the
  0 deg compensation plates, whose |V> sign cancels in the post-selected
  output) maps a rail qubit back onto a polarization qubit amplitude for
  amplitude; it is modeled as a relabeling.
* The coincidence-post-selected beam-splitter stage keeps the |HH> branch
  with rails untouched and the |VV> branch with the rail-qubit contents of
  the two arms exchanged, at overall probability 1/2.

Stage weights are tracked per stage.  The post-selection cost 1/2 is charged
once, at the entangling stage; the erasure weight is quoted relative to the
coherent branch pair (twice the raw conditional probability), so the product
of stage weights equals ``norm**2 / 2`` of the final projected amplitude --
the machine's quoted success probability.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import LinearOperator, StateVector
from .protocol import Qubit, ZeroSuccessError, canonical_phase

_SQRT2 = math.sqrt(2.0)
_EPS = 1e-12


def rotation(angle: float) -> np.ndarray:
    """Rotation of the polarization plane by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def waveplate_jones(angle: float, retardance: float) -> LinearOperator:
    """Jones matrix of a retarder with fast axis at ``angle`` radians.

    R(angle) @ diag(1, exp(-i*retardance)) @ R(-angle); unitary for any
    setting.
    """
    r = rotation(angle)
    d = np.diag([1.0, np.exp(-1j * retardance)])
    return LinearOperator((2,), (2,), r @ d @ r.conj().T)


def hwp_jones(angle: float) -> LinearOperator:
    """Half-wave plate: maps |H> to |+> at 22.5 deg and |H> to |V> at 45 deg."""
    return waveplate_jones(angle, math.pi)


def qwp_jones(angle: float) -> LinearOperator:
    """Quarter-wave plate: maps |H> to (|H>+i|V>)/sqrt(2) at 45 deg."""
    return waveplate_jones(angle, math.pi / 2.0)


@dataclass(frozen=True)
class CircuitConfig:
    """Inputs and erasure angle for one run of the interferometer."""

    input1: Qubit
    input2: Qubit
    theta: float = math.pi / 4.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2.0 + _EPS:
            raise ValueError(f"theta {self.theta} outside [0, pi/2]")


@dataclass(frozen=True)
class CircuitOutcome:
    """Photon-1 output with total and per-stage success probabilities."""

    output: Qubit
    success_prob: float
    stage_probs: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.success_prob <= 0.5 + _EPS:
            raise ValueError(f"success probability {self.success_prob} outside [0, 1/2]")


def prepare_input(config: CircuitConfig) -> StateVector:
    """Encode both inputs on rail qubits, both polarizations rotated to |+>.

    Returns (a|0> + b|1>)_rail1 |+>_pol1 (c|0> + d|1>)_rail2 |+>_pol2 with
    the 22.5 deg half-wave plates providing the |+> polarizations.
    """
    plus = hwp_jones(math.pi / 8.0).matrix @ np.array([1.0, 0.0], dtype=np.complex128)
    amps = np.kron(
        np.kron(config.input1.vector(), plus),
        np.kron(config.input2.vector(), plus),
    )
    return StateVector((2, 2, 2, 2), amps)


def pbs1_postselect(state: StateVector) -> tuple[StateVector, float]:
    """Coincidence-post-selected entangling beam splitter.

    Keeps the |HH> branch with rails untouched and the |VV> branch with the
    two arms' rail contents exchanged; mixed-polarization components leave
    through a single arm and are discarded.  Returns the normalized surviving
    state and the post-selection probability (1/2 for prepared inputs).
    """
    if state.dims != (2, 2, 2, 2):
        raise ValueError(f"expected dims (2, 2, 2, 2), got {state.dims}")
    t = state.tensor()
    out = np.zeros_like(t)
    out[:, 0, :, 0] = t[:, 0, :, 0]
    out[:, 1, :, 1] = t[:, 1, :, 1].T
    prob = float(np.sum(np.abs(out) ** 2))
    if prob < _EPS:
        raise ValueError("input has no coincidence support (outside the modeled subspace)")
    return StateVector(state.dims, out.ravel() / math.sqrt(prob)), prob


def erase_matrix(theta: float) -> np.ndarray:
    """4x16 map from the post-selection space to the recovered two-qubit space.

    Composes the theta/2 half-wave plates on both polarizations, the |H>
    projections behind them, and the rail-to-polarization recovery.
    """
    h_row = hwp_jones(theta / 2.0).matrix[0, :].reshape(1, 2)
    eye = np.eye(2, dtype=np.complex128)
    return np.kron(np.kron(eye, h_row), np.kron(eye, h_row))


def erase_control(state: StateVector, theta: float) -> tuple[StateVector, float]:
    """Erase the which-branch information and recover polarization qubits.

    Returns the normalized two-qubit state proportional to
    cos(theta)**2 |psi>|phi> + sin(theta)**2 |phi>|psi> and the stage weight,
    quoted relative to the coherent branch pair (see module docstring).
    """
    if state.dims != (2, 2, 2, 2):
        raise ValueError(f"expected dims (2, 2, 2, 2), got {state.dims}")
    w = erase_matrix(theta) @ state.amplitudes
    raw = float(np.sum(np.abs(w) ** 2))
    stage = 2.0 * raw
    if stage < _EPS:
        raise ZeroSuccessError("erasure projection has vanishing amplitude")
    return StateVector((2, 2), w / math.sqrt(raw)), stage


def project_photon2(
    state: StateVector, stage_probs: Mapping[str, float]
) -> CircuitOutcome:
    """Project photon 2 onto |H> and assemble the heralded outcome.

    ``stage_probs`` carries the weights of the preceding stages; the total
    success probability is their product times this projection's weight and
    equals norm**2 / 2 of the closed-form output amplitude.
    """
    if state.dims != (2, 2):
        raise ValueError(f"expected dims (2, 2), got {state.dims}")
    u = state.tensor()[:, 0]
    wp = float(np.sum(np.abs(u) ** 2))
    total = wp
    for p in stage_probs.values():
        total *= p
    nf = math.sqrt(2.0 * total)
    if nf < _EPS:
        raise ZeroSuccessError(
            "zero overlap with referential state (or fully destructive interference)"
        )
    stages = dict(stage_probs)
    stages["project"] = wp
    output = Qubit(*canonical_phase(u / math.sqrt(wp)))
    return CircuitOutcome(output, total, stages)


def run_circuit(config: CircuitConfig) -> CircuitOutcome:
    """Run the four-stage interferometer end to end.

    Agrees with :func:`qadder.protocol.superpose_theta` in output state (up
    to global phase) and success probability.
    """
    prepared = prepare_input(config)
    selected, p_select = pbs1_postselect(prepared)
    erased, p_erase = erase_control(selected, config.theta)
    return project_photon2(erased, {"postselect": p_select, "erase": p_erase})

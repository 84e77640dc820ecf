"""Visibility-calibrated imperfections and stochastic photon counting.

The only quantitative imperfection in the model is the residual coherence of
the post-selected entangled control state, measured as a visibility V: the
coherences between the no-swap (|HH>) and swap (|VV>) branches are scaled by
V while the branch populations stay untouched.  By default V is the control
state's measured visibility alone; a calibration switch multiplies in the
two-photon interference and interferometer-fringe visibilities instead,
since how the three figures combine is not uniquely determined.

Counting statistics are multinomial with a fixed total per measurement
setting, drawn from a seeded PCG64 generator so every experiment is
bit-reproducible.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .core import DensityOperator, StateVector
from .circuit import CircuitConfig, erase_matrix, pbs1_postselect, prepare_input
from .protocol import ZeroSuccessError

_EPS = 1e-12

VISIBILITY_MODES = ("control", "product")


@dataclass(frozen=True)
class NoiseModel:
    """Calibration parameters of the imperfect machine."""

    control_visibility: float = 0.984
    hom_visibility: float = 0.996
    mzi_visibility: float = 0.98
    total_counts: int = 5000
    visibility_mode: str = "control"

    def __post_init__(self):
        for name in ("control_visibility", "hom_visibility", "mzi_visibility"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} {v} outside [0, 1]")
        if self.total_counts < 1:
            raise ValueError("total_counts must be at least 1")
        if self.visibility_mode not in VISIBILITY_MODES:
            raise ValueError(f"visibility_mode must be one of {VISIBILITY_MODES}")

    @property
    def effective_visibility(self) -> float:
        """Single dephasing parameter fed to the control-state channel."""
        if self.visibility_mode == "product":
            return self.control_visibility * self.hom_visibility * self.mzi_visibility
        return self.control_visibility


class RandomSource:
    """Seeded deterministic random generator (PCG64 behind numpy Generator).

    A source is single-owner: concurrent consumers must each hold their own,
    typically via :meth:`derive`.
    """

    def __init__(self, seed: int, algorithm: str = "pcg64"):
        if algorithm != "pcg64":
            raise ValueError(f"unsupported generator algorithm {algorithm!r}")
        self.seed = int(seed)
        self.algorithm = algorithm
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def derive(self, *tokens) -> "RandomSource":
        """Independent source with a seed derived via SHA-256 from ``tokens``."""
        digest = hashlib.sha256()
        digest.update(str(self.seed).encode())
        for tok in tokens:
            digest.update(b"\x1f")
            digest.update(str(tok).encode())
        return RandomSource(
            int.from_bytes(digest.digest()[:8], "big") & 0x7FFFFFFFFFFFFFFF,
            self.algorithm,
        )

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, algorithm={self.algorithm!r})"


def sample_counts(probabilities, total: int, rng: RandomSource) -> np.ndarray:
    """Multinomial counts with the given fixed total.

    ``probabilities`` must be nonnegative and sum to 1 within 1e-9; the draw
    is deterministic under a fixed source.
    """
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0.0):
        raise ValueError(f"negative probability in {p}")
    s = float(p.sum())
    if abs(s - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {s}, not 1 within 1e-9")
    if total < 1:
        raise ValueError("total must be at least 1")
    return rng.generator.multinomial(int(total), p / s)


def _pol_sectors(dims: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the |HH> and |VV> polarization sectors of the basis."""
    n = int(np.prod(dims))
    idx = np.arange(n)
    pol1 = (idx >> 2) & 1
    pol2 = idx & 1
    return (pol1 == 0) & (pol2 == 0), (pol1 == 1) & (pol2 == 1)


def apply_control_dephasing(state, visibility: float) -> DensityOperator:
    """Dephase the post-selected control state to the given visibility.

    Coherences between the no-swap and swap branches are multiplied by V;
    branch populations are unchanged.  Coherences between the branch pair and
    any residual mixed-polarization component are removed, which keeps the
    map completely positive and trace preserving on the post-selected
    subspace.  Accepts a pure state or a density operator and is linear in
    the latter.
    """
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility {visibility} outside [0, 1]")
    if isinstance(state, StateVector):
        state = state.density()
    if state.dims != (2, 2, 2, 2):
        raise ValueError(f"expected dims (2, 2, 2, 2), got {state.dims}")
    hh, vv = _pol_sectors(state.dims)
    rest = ~(hh | vv)
    mat = np.array(state.matrix, copy=True)
    mat[np.outer(hh, vv)] *= visibility
    mat[np.outer(vv, hh)] *= visibility
    mat[np.outer(rest, ~rest)] = 0.0
    mat[np.outer(~rest, rest)] = 0.0
    return DensityOperator(state.dims, mat, normalized=state.normalized)


def noisy_run(config: CircuitConfig, noise: NoiseModel) -> tuple[DensityOperator, float]:
    """Run the interferometer with control dephasing; mixed-state output.

    Returns the photon-1 density operator and the total success probability
    (same stage accounting as :func:`qadder.circuit.run_circuit`, to which
    this reduces exactly at visibility 1).
    """
    selected, p_select = pbs1_postselect(prepare_input(config))
    rho = apply_control_dephasing(selected, noise.effective_visibility).matrix

    e = erase_matrix(config.theta)
    rho_e = e @ rho @ e.conj().T
    raw = float(np.trace(rho_e).real)
    p_erase = 2.0 * raw
    if p_erase < _EPS:
        raise ZeroSuccessError("erasure projection has vanishing amplitude")
    rho_e /= raw

    # <H| on photon 2: keep columns/rows with pol2 = 0 of the (2, 2) space.
    rho_out = rho_e.reshape(2, 2, 2, 2)[:, 0, :, 0]
    w_project = float(np.trace(rho_out).real)
    total = p_select * p_erase * w_project
    nf = np.sqrt(2.0 * total)
    if nf < _EPS:
        raise ZeroSuccessError(
            "zero overlap with referential state (or fully destructive interference)"
        )
    return DensityOperator((2,), rho_out / w_project), total


__all__ = [
    "NoiseModel",
    "RandomSource",
    "VISIBILITY_MODES",
    "apply_control_dephasing",
    "noisy_run",
    "sample_counts",
]

"""Experiment configuration, batch harness, sweeps and result emission.

A single JSON document describes an experiment: the input qubit pairs, the
erasure angle, the noise calibration, counting statistics and seeds.  The
harness runs every pair in one of three modes --

* ``ideal``: noiseless interferometer, metrics against the closed-form
  expected superposition (deterministic, seed independent);
* ``noisy``: dephased interferometer output compared directly;
* ``tomographic``: dephased output measured with multinomial counting,
  reconstructed by maximum likelihood, then compared --

and emits one aggregated row per pair as CSV or JSON.  Pairs whose heralded
projection has zero amplitude become error rows, never aborts.

Reproducibility: every per-trial generator seed is ``base_seed XOR h`` where
``h`` is the first 8 bytes of the SHA-256 digest of the pair amplitudes and
the trial index, so results do not depend on the position of a pair in the
list and identical documents produce byte-identical output files.
"""

import dataclasses
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __about__
from .circuit import CircuitConfig, run_circuit
from .core import fidelity, trace_distance
from .noise import NoiseModel, RandomSource, noisy_run
from .protocol import PLUS, Qubit, ZeroSuccessError, superpose_theta
from .tomography import bootstrap_errors, mle_reconstruct, simulate_measurements

MODES = ("ideal", "noisy", "tomographic")
SWEEP_PARAMETERS = ("theta", "phase", "visibility")

_NORM_WARN = 1e-9
_NORM_ERROR = 1e-3
_BOOTSTRAP_RESAMPLES = 100

_TOP_LEVEL_KEYS = {
    "pairs",
    "theta_degrees",
    "noise",
    "shots",
    "seeds",
    "trials_per_pair",
    "mode",
}
_PAIR_KEYS = {"input1", "input2", "label1", "label2"}
_NOISE_KEYS = {
    "control_visibility",
    "hom_visibility",
    "mzi_visibility",
    "total_counts",
    "visibility_mode",
}
_BLOCH_KEYS = {"theta", "phi"}


def format_qubit(q: Qubit) -> str:
    """Deterministic compact label for a qubit (used when none is given)."""
    def amp(z: complex) -> str:
        return f"{z.real:.6g}{z.imag:+.6g}i"

    return f"[{amp(q.a)} {amp(q.b)}]"


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one batch experiment."""

    pairs: tuple[tuple[Qubit, Qubit], ...]
    labels: tuple[tuple[str, str], ...] = ()
    theta_degrees: float = 45.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    shots: int = 5000
    seeds: tuple[int, ...] = (12345,)
    trials_per_pair: int = 1
    mode: str = "ideal"

    def __post_init__(self):
        pairs = tuple((q1, q2) for q1, q2 in self.pairs)
        if not pairs:
            raise ValueError("experiment needs at least one input pair")
        labels = tuple((str(a), str(b)) for a, b in self.labels)
        if not labels:
            labels = tuple((format_qubit(q1), format_qubit(q2)) for q1, q2 in pairs)
        if len(labels) != len(pairs):
            raise ValueError("labels and pairs must have the same length")
        if not 0.0 <= self.theta_degrees <= 90.0:
            raise ValueError(f"theta_degrees {self.theta_degrees} outside [0, 90]")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.trials_per_pair < 1:
            raise ValueError("trials_per_pair must be at least 1")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def theta(self) -> float:
        return math.radians(self.theta_degrees)

    def to_dict(self) -> dict:
        """Canonical JSON-able echo of the document (exact round trip)."""
        def amp(z: complex) -> list[float]:
            return [z.real, z.imag]

        return {
            "pairs": [
                {
                    "input1": [amp(q1.a), amp(q1.b)],
                    "input2": [amp(q2.a), amp(q2.b)],
                    "label1": l1,
                    "label2": l2,
                }
                for (q1, q2), (l1, l2) in zip(self.pairs, self.labels)
            ],
            "theta_degrees": self.theta_degrees,
            "noise": {
                "control_visibility": self.noise.control_visibility,
                "hom_visibility": self.noise.hom_visibility,
                "mzi_visibility": self.noise.mzi_visibility,
                "total_counts": self.noise.total_counts,
                "visibility_mode": self.noise.visibility_mode,
            },
            "shots": self.shots,
            "seeds": list(self.seeds),
            "trials_per_pair": self.trials_per_pair,
            "mode": self.mode,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_dict(), sort_keys=True).encode()
        ).hexdigest()


@dataclass(frozen=True)
class ResultRow:
    """One aggregated line of results for a pair (or an error marker)."""

    pair_id: str
    input1: str
    input2: str
    fidelity: float
    fidelity_std: float
    distance: float
    distance_std: float
    success_prob: float
    mode: str
    error: str | None = None

    def __post_init__(self):
        if self.error is None:
            if not 0.0 <= self.fidelity <= 1.0 or not 0.0 <= self.distance <= 1.0:
                raise ValueError("fidelity and distance must lie in [0, 1]")
            if self.fidelity_std < 0.0 or self.distance_std < 0.0:
                raise ValueError("error bars must be nonnegative")


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[ResultRow, ...]
    metadata: dict

    def all_failed(self) -> bool:
        return all(row.error is not None for row in self.rows)


def _check_keys(obj: dict, allowed: set, where: str, strict: bool):
    unknown = sorted(set(obj) - allowed)
    if unknown:
        msg = f"unknown {where} field(s): {', '.join(unknown)}"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg)


def _parse_state(value, strict: bool) -> Qubit:
    if isinstance(value, dict):
        _check_keys(value, _BLOCH_KEYS, "Bloch state", strict)
        if "theta" not in value:
            raise ValueError("Bloch state needs at least a 'theta' angle (degrees)")
        theta = math.radians(float(value["theta"]))
        phi = math.radians(float(value.get("phi", 0.0)))
        return Qubit.from_bloch(theta, phi)
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ValueError(f"state must be [[re, im], [re, im]] or Bloch angles, got {value!r}")
    amps = []
    for entry in value:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise ValueError(f"amplitude must be a [re, im] pair, got {entry!r}")
        amps.append(complex(float(entry[0]), float(entry[1])))
    a, b = amps
    deviation = abs(math.sqrt(abs(a) ** 2 + abs(b) ** 2) - 1.0)
    if deviation > _NORM_ERROR:
        raise ValueError(f"state norm deviates from 1 by {deviation:.3g} (> {_NORM_ERROR})")
    if deviation > _NORM_WARN:
        warnings.warn(f"state norm off by {deviation:.3g}; renormalizing")
    if deviation <= 1e-12:  # keep bit-exact amplitudes so documents round-trip
        return Qubit(a, b)
    return Qubit.from_amplitudes(a, b)


def parse_spec(text: str, strict: bool = True) -> ExperimentSpec:
    """Parse and validate an experiment document (JSON).

    Unknown fields raise in strict mode and warn otherwise; state norms off
    by more than 1e-3 are errors, smaller deviations renormalize with a
    warning.
    """
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("experiment document must be a JSON object")
    _check_keys(data, _TOP_LEVEL_KEYS, "experiment", strict)
    if "pairs" not in data or not data["pairs"]:
        raise ValueError("experiment document needs a nonempty 'pairs' list")

    pairs, labels = [], []
    for entry in data["pairs"]:
        if isinstance(entry, dict):
            _check_keys(entry, _PAIR_KEYS, "pair", strict)
            if "input1" not in entry or "input2" not in entry:
                raise ValueError("pair objects need 'input1' and 'input2'")
            q1 = _parse_state(entry["input1"], strict)
            q2 = _parse_state(entry["input2"], strict)
            labels.append(
                (entry.get("label1", format_qubit(q1)), entry.get("label2", format_qubit(q2)))
            )
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            q1 = _parse_state(entry[0], strict)
            q2 = _parse_state(entry[1], strict)
            labels.append((format_qubit(q1), format_qubit(q2)))
        else:
            raise ValueError(f"pair must be an object or a 2-list, got {entry!r}")
        pairs.append((q1, q2))

    noise_data = data.get("noise", {})
    if not isinstance(noise_data, dict):
        raise ValueError("'noise' must be an object")
    _check_keys(noise_data, _NOISE_KEYS, "noise", strict)
    noise = NoiseModel(**{k: noise_data[k] for k in _NOISE_KEYS if k in noise_data})

    seeds = data.get("seeds", [12345])
    if isinstance(seeds, int):
        seeds = [seeds]
    return ExperimentSpec(
        pairs=tuple(pairs),
        labels=tuple(labels),
        theta_degrees=float(data.get("theta_degrees", 45.0)),
        noise=noise,
        shots=int(data.get("shots", 5000)),
        seeds=tuple(int(s) for s in seeds),
        trials_per_pair=int(data.get("trials_per_pair", 1)),
        mode=str(data.get("mode", "ideal")),
    )


_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

_PHASE_FRACTIONS = (0.775, 0.633, 0.45, 0.33, 0.147)


def _phase_state(fraction_of_pi: float) -> Qubit:
    return Qubit(1.0 / _SQRT2, np.exp(1j * math.pi * fraction_of_pi) / _SQRT2)


def _phase_label(fraction_of_pi: float) -> str:
    return f"(|H>+e^{{i{fraction_of_pi:g}pi}}|V>)/sqrt2"


def builtin_table1() -> ExperimentSpec:
    """The built-in benchmark of 11 representative input pairs.

    Three pair families: |H> against real superpositions, real against real
    (including the orthogonal pair), and equal-weight pairs scanning the
    relative phase.  Defaults: 45 degree erasure, stock noise calibration,
    5000 counts.
    """
    h = (Qubit(1.0, 0.0), "|H>")
    plus = (Qubit(1.0 / _SQRT2, 1.0 / _SQRT2), "(|H>+|V>)/sqrt2")
    minus = (Qubit(1.0 / _SQRT2, -1.0 / _SQRT2), "(|H>-|V>)/sqrt2")
    r21 = (Qubit(math.sqrt(2.0) / _SQRT3, 1.0 / _SQRT3), "(sqrt2|H>+|V>)/sqrt3")
    r12 = (Qubit(1.0 / _SQRT3, math.sqrt(2.0) / _SQRT3), "(|H>+sqrt2|V>)/sqrt3")

    labeled = [(h, plus), (h, r21), (h, r12), (plus, r21), (r21, r12), (plus, minus)]
    for frac in _PHASE_FRACTIONS:
        labeled.append((plus, (_phase_state(frac), _phase_label(frac))))
    pairs = [(a[0], b[0]) for a, b in labeled]
    labels = [(a[1], b[1]) for a, b in labeled]
    return ExperimentSpec(
        pairs=tuple(pairs),
        labels=tuple(labels),
        theta_degrees=45.0,
        noise=NoiseModel(),
        shots=5000,
        seeds=(12345,),
        trials_per_pair=1,
        mode="tomographic",
    )


def _trial_seed(base_seed: int, q1: Qubit, q2: Qubit, trial: int) -> int:
    parts = [f"{z.real:.17g},{z.imag:.17g}" for z in (q1.a, q1.b, q2.a, q2.b)]
    token = ";".join(parts) + f"|{trial}"
    h = int.from_bytes(hashlib.sha256(token.encode()).digest()[:8], "big")
    return (int(base_seed) ^ h) & 0x7FFFFFFFFFFFFFFF


def _metrics_pure(target: Qubit, output: Qubit) -> tuple[float, float]:
    sigma = target.state().density()
    rho = output.state().density()
    return fidelity(rho, sigma), trace_distance(rho, sigma)


def _run_pair(q1: Qubit, q2: Qubit, spec: ExperimentSpec):
    """Metrics (f, f_std, d, d_std, success) for one pair under spec.mode."""
    config = CircuitConfig(q1, q2, spec.theta)
    target = superpose_theta(q1, q2, spec.theta).state
    sigma = target.state().density()

    if spec.mode == "ideal":
        outcome = run_circuit(config)
        f, d = _metrics_pure(target, outcome.output)
        return f, 0.0, d, 0.0, outcome.success_prob

    rho, success = noisy_run(config, spec.noise)
    if spec.mode == "noisy":
        return fidelity(rho, sigma), 0.0, trace_distance(rho, sigma), 0.0, success

    shots_per_setting = spec.shots // 3
    if shots_per_setting < 1:
        raise ValueError("tomographic mode needs shots >= 3")
    fids, dists = [], []
    last = None
    for base_seed in spec.seeds:
        for trial in range(spec.trials_per_pair):
            rng = RandomSource(_trial_seed(base_seed, q1, q2, trial))
            counts = simulate_measurements(rho, shots_per_setting, rng)
            est = mle_reconstruct(counts)
            fids.append(fidelity(est, sigma))
            dists.append(trace_distance(est, sigma))
            last = (counts, rng)
    if len(fids) == 1:
        counts, rng = last
        (f, f_std), (d, d_std) = bootstrap_errors(
            counts, target, _BOOTSTRAP_RESAMPLES, rng
        )
        return f, f_std, d, d_std, success
    fids = np.asarray(fids)
    dists = np.asarray(dists)
    return (
        float(fids.mean()),
        float(fids.std(ddof=1)),
        float(dists.mean()),
        float(dists.std(ddof=1)),
        success,
    )


def _error_row(pair_id, l1, l2, mode, message) -> ResultRow:
    nan = float("nan")
    return ResultRow(pair_id, l1, l2, nan, nan, nan, nan, nan, mode, error=message)


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    """Run every pair, aggregating trials; no-go pairs become error rows."""
    rows = []
    for i, ((q1, q2), (l1, l2)) in enumerate(zip(spec.pairs, spec.labels), start=1):
        pair_id = str(i)
        try:
            f, f_std, d, d_std, success = _run_pair(q1, q2, spec)
            rows.append(
                ResultRow(pair_id, l1, l2, f, f_std, d, d_std, success, spec.mode)
            )
        except ZeroSuccessError as exc:
            rows.append(_error_row(pair_id, l1, l2, spec.mode, str(exc)))
    metadata = {
        "spec_hash": spec.digest(),
        "seeds": list(spec.seeds),
        "version": __about__.__version__,
    }
    return ResultTable(tuple(rows), metadata)


def sweep(spec: ExperimentSpec, parameter: str, grid) -> ResultTable:
    """One aggregated row per grid point (per pair for theta/visibility).

    ``theta``: grid of erasure angles in degrees, applied to every pair of
    the base spec.  ``phase``: grid in units of pi; each point pairs the
    fixed (|H>+|V>)/sqrt2 input with (|H>+e^{i g pi}|V>)/sqrt2.
    ``visibility``: grid of control visibilities; runs in noisy mode when
    the base spec is ideal (visibility has no effect there).
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("sweep grid must be nonempty")
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"parameter must be one of {SWEEP_PARAMETERS}")

    rows: list[ResultRow] = []
    if parameter == "theta":
        for g in grid:
            if not 0.0 <= g <= 90.0:
                raise ValueError(f"theta grid point {g} outside [0, 90]")
            sub = dataclasses.replace(spec, theta_degrees=g)
            for row in run_experiment(sub).rows:
                rows.append(dataclasses.replace(row, pair_id=f"theta={g:g}#{row.pair_id}"))
    elif parameter == "phase":
        for g in grid:
            sub = dataclasses.replace(
                spec,
                pairs=((PLUS, _phase_state(g)),),
                labels=(("(|H>+|V>)/sqrt2", _phase_label(g)),),
            )
            for row in run_experiment(sub).rows:
                rows.append(dataclasses.replace(row, pair_id=f"phase={g:g}pi"))
    else:
        mode = "noisy" if spec.mode == "ideal" else spec.mode
        for g in grid:
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"visibility grid point {g} outside [0, 1]")
            sub = dataclasses.replace(
                spec,
                mode=mode,
                noise=dataclasses.replace(spec.noise, control_visibility=g),
            )
            for row in run_experiment(sub).rows:
                rows.append(
                    dataclasses.replace(row, pair_id=f"visibility={g:g}#{row.pair_id}")
                )
    metadata = {
        "spec_hash": spec.digest(),
        "seeds": list(spec.seeds),
        "version": __about__.__version__,
        "sweep": {"parameter": parameter, "grid": grid},
    }
    return ResultTable(tuple(rows), metadata)


CSV_COLUMNS = (
    "pair_id",
    "input1",
    "input2",
    "fidelity",
    "fidelity_std",
    "distance",
    "distance_std",
    "success_prob",
    "mode",
)


def _csv_quote(value: str) -> str:
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def emit(table: ResultTable, format: str, destination) -> None:
    """Write the table as CSV (fixed columns, %.6f, LF) or JSON (verbatim).

    ``destination`` is a path or a writable text file object.  Output is
    deterministic for fixed seeds: no timestamps, stable key order.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")

    if format == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for row in table.rows:
            lines.append(
                ",".join(
                    [
                        _csv_quote(row.pair_id),
                        _csv_quote(row.input1),
                        _csv_quote(row.input2),
                        f"{row.fidelity:.6f}",
                        f"{row.fidelity_std:.6f}",
                        f"{row.distance:.6f}",
                        f"{row.distance_std:.6f}",
                        f"{row.success_prob:.6f}",
                        row.mode,
                    ]
                )
            )
        payload = "\n".join(lines) + "\n"
    else:
        payload = (
            json.dumps(
                {
                    "rows": [dataclasses.asdict(row) for row in table.rows],
                    "metadata": table.metadata,
                },
                indent=2,
                allow_nan=True,
            )
            + "\n"
        )

    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        destination.write(payload)

"""Simulator of a heralded linear-optical machine that superposes two (or n)
unknown polarization qubits, with calibrated imperfections, simulated state
tomography and a reproducible experiment harness."""

from .__about__ import __version__
from .core import (
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
from .protocol import (
    BALANCED_CONTROL,
    HORIZONTAL_REFERENTIAL,
    AdderOutcome,
    ControlQubit,
    Qubit,
    ReferentialState,
    ZeroSuccessError,
    canonical_phase,
    control_swap,
    project_control,
    project_referential,
    sequential_cswap_state,
    superpose,
    superpose_n,
    superpose_theta,
)
from .circuit import (
    CircuitConfig,
    CircuitOutcome,
    erase_control,
    hwp_jones,
    pbs1_postselect,
    prepare_input,
    project_photon2,
    qwp_jones,
    run_circuit,
    waveplate_jones,
)
from .noise import (
    NoiseModel,
    RandomSource,
    apply_control_dephasing,
    noisy_run,
    sample_counts,
)
from .tomography import (
    MEASUREMENT_SETTINGS,
    CountsRecord,
    MeasurementSetting,
    ReconstructionError,
    ReconstructionResult,
    bootstrap_errors,
    linear_inversion,
    mle_reconstruct,
    simulate_measurements,
)
from .experiment import (
    ExperimentSpec,
    ResultRow,
    ResultTable,
    builtin_table1,
    emit,
    parse_spec,
    run_experiment,
    sweep,
)

__all__ = [
    "__version__",
    # core
    "StateVector",
    "DensityOperator",
    "LinearOperator",
    "tensor_product",
    "partial_trace",
    "matrix_sqrt_psd",
    "fidelity",
    "trace_distance",
    "overlap",
    "normalize",
    "DimensionMismatchError",
    "NotPSDError",
    "DegenerateStateError",
    # protocol
    "Qubit",
    "ControlQubit",
    "ReferentialState",
    "AdderOutcome",
    "ZeroSuccessError",
    "BALANCED_CONTROL",
    "HORIZONTAL_REFERENTIAL",
    "canonical_phase",
    "control_swap",
    "project_control",
    "project_referential",
    "superpose",
    "superpose_theta",
    "superpose_n",
    "sequential_cswap_state",
    # circuit
    "CircuitConfig",
    "CircuitOutcome",
    "waveplate_jones",
    "hwp_jones",
    "qwp_jones",
    "prepare_input",
    "pbs1_postselect",
    "erase_control",
    "project_photon2",
    "run_circuit",
    # noise
    "NoiseModel",
    "RandomSource",
    "apply_control_dephasing",
    "noisy_run",
    "sample_counts",
    # tomography
    "MeasurementSetting",
    "MEASUREMENT_SETTINGS",
    "CountsRecord",
    "ReconstructionResult",
    "ReconstructionError",
    "simulate_measurements",
    "linear_inversion",
    "mle_reconstruct",
    "bootstrap_errors",
    # experiment
    "ExperimentSpec",
    "ResultRow",
    "ResultTable",
    "parse_spec",
    "builtin_table1",
    "run_experiment",
    "sweep",
    "emit",
]

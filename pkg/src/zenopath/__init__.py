"""Measurement-driven ground-state tracking along Hamiltonian interpolation paths.

A dense simulator for sweeps that replace slow Hamiltonian evolution with
sequences of ground-space measurements, realized for frustration-free
Hamiltonians by repeatedly measuring randomly chosen individual terms.
"""

from .errors import (
    ConfigError,
    ConstructionFailed,
    DegeneratePath,
    DependentGenerators,
    DimensionMismatch,
    FrustrationFreeViolation,
    IndexOutOfRange,
    KMaxExceeded,
    NoGap,
    NonCommutingGenerators,
    NonConvergent,
    NonHermitianInput,
    NotNormalizedTerm,
    NotPositiveSemidefinite,
    SupportOutOfRange,
    UnsatisfiableInstance,
    ZenopathError,
    ZeroGroundOverlap,
    ZeroSuccessProbability,
)
from .hamiltonians import (
    DiscretizedPath,
    FrustrationFreeHamiltonian,
    FrustrationFreeReport,
    InterpolationPath,
    LocalTerm,
    assemble_full,
    discretize,
    embed_on_qubits,
    normalize_term,
    step_difference_norm,
    verify_frustration_free,
)
from .instances import (
    InstanceSpec,
    count_satisfying,
    parse_dimacs,
    pauli_string_matrix,
    random_ff_instance,
    rotating_ground_state,
    rotating_projector_path,
    sat_projector_instance,
    stabilizer_path,
)
from .measurement import (
    MeasurementOutcome,
    PovmPair,
    RepeatedResult,
    RepetitionPolicy,
    apply_m_channel,
    apply_m_repeated,
    apply_m_trajectory,
    build_povm,
    povm_ensemble,
    success_probability,
)
from .protocol import (
    EmpiricalStats,
    ProtocolConfig,
    ProtocolReport,
    StepRecord,
    compute_conventional_time,
    run,
    run_ideal,
    run_measured,
)
from .schedule import (
    GapPoint,
    ScheduleAnalysis,
    ScheduleStep,
    analyze_schedule,
    gap_profile,
    required_steps,
)
from .spectral import (
    HermitianOperator,
    Projector,
    QuantumState,
    eigendecompose,
    ground_projector,
    ground_space_basis,
    psd_sqrt,
    spectral_gap,
    spectral_norm,
    trace_distance,
)

__version__ = "0.1.0"

"""Grover amplitude amplification on dense statevectors, with a measurement model
in which the apparatus singles out one outcome by running Grover search."""

from .statevector import (
    DimensionError,
    NonUnitaryError,
    NormError,
    SizeError,
    StateVector,
    apply_dense_unitary,
    apply_hadamard_all,
    born_sample,
    inner_product,
    probability,
    random_source,
    uniform_state,
    zero_state,
)
from .grover import (
    GroverPlan,
    MarkedSet,
    apply_diffusion,
    apply_generalized_diffusion,
    apply_oracle,
    apply_phase_shift_zero,
    grover_step,
    optimal_iterations,
    predict_state,
    rotation_angle,
    run_grover,
    split_components,
)
from .measurement import (
    DensityMatrix,
    DetectorModel,
    ExperimentDescriptor,
    MeasurementEvent,
    ModelComparison,
    RegisterTooSmallError,
    RunStats,
    SystemSpec,
    build_entangled_state,
    coherence_norm,
    compare_models,
    project_reduce,
    pure_density_matrix,
    run_experiment,
    run_measurement_event,
    stern_gerlach_spec,
)
from . import bruteforce

__version__ = "0.1.0"

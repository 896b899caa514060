"""Numerical laboratory for one-bit entanglement-assisted vs one-hyperbit communication."""

from .kernels import BACKEND
from .quantum_core import (
    BipartiteInstance,
    DichotomicObservable,
    ProjectorPair,
    QuantumState,
    alice_bias,
    bell_chsh_instance,
    bob_quantum_expectation,
    born_correlation,
    partial_trace_alice,
    projectors_from_observable,
    steering_state,
    tensor_product,
)
from .tsirelson import (
    BobEffectDecomposition,
    TsirelsonImage,
    build_gram,
    coordinates,
    decompose_bob_effect,
    factorize_to_image,
    tsirelson_image,
)
from .protocol import (
    Hyperbit,
    PWStrategy,
    SimulationReport,
    StrategyWeights,
    apply_deterministic,
    pw_expectation,
    pw_q,
    pw_strategy,
    pw_to_weights,
    raw_expectation,
    sample_outcome,
    simulate_protocol,
    strategy_expectation,
)
from .regions import (
    GapReport,
    RegionLabel,
    RegionPoint,
    admissible_z_interval,
    classify,
    helix_point,
    in_C,
    in_D,
    minimax_gap,
    scan_region,
    target_t,
    weights_for,
    z_aware_weights,
)
from .harness import (
    CounterexampleRecord,
    EquivalenceReport,
    find_counterexample,
    random_instance,
    verify_equivalence,
)

__version__ = "0.1.0"

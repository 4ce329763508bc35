"""Classical protocols that reproduce Bell-pair measurement statistics with one or two bits."""

from .geom import Rotation3, RngStream, UnitVector3, dot, sample_rotation, sample_unit_vector, sgn
from .harness import (
    EstimatorResult,
    ScenarioConfig,
    channel_statistics,
    compare_joint_distribution,
    entropy_integral,
    eq2_estimate,
    estimate_chsh,
    estimate_correlator,
    estimate_teleportation,
    mutual_information_transcript,
    sweep_correlator,
)
from .protocols import (
    RoundRecord,
    SharedRandomness,
    bell_local_round,
    classical_teleportation_round,
    partial_entanglement_round,
    randomize_inputs,
    toner_bacon_round,
)
from .quantum import (
    SINGLET,
    TwoQubitPureState,
    alice_marginal,
    bob_post_measurement_direction,
    chsh_value,
    joint_prob,
    singlet_correlator,
)

__version__ = "0.1.0"

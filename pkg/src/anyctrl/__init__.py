"""Sequence-based anytime control: buffered controllers under random processor
availability, closed-form stochastic-stability certificates, and a seeded
Monte-Carlo experiment harness."""

from .availability import (IidAvailability, MarkovAvailability,
                           from_execution_time, make_sampler, sample_n,
                           validate)
from .controller import (BufferState, ControllerKind, TentativeSequence,
                         controller_step, empty_buffer,
                         predict_buffer_playback, shift, tentative_sequence)
from .errors import (CertificateViolation, ConfigError, DegenerateStateError,
                     DimensionError, DivergenceError)
from .plants import DisturbanceModel, PlantModel, make_builtin_plant, step
from .simulation import (CostSummary, SimConfig, SimTrace, empirical_cost,
                         improvement_pct, monte_carlo, run_episode)
from .stability import CertificateInputs, StabilityReport, evaluate

__all__ = [
    "IidAvailability", "MarkovAvailability", "from_execution_time",
    "make_sampler", "sample_n", "validate",
    "BufferState", "ControllerKind", "TentativeSequence", "controller_step",
    "empty_buffer", "predict_buffer_playback", "shift", "tentative_sequence",
    "CertificateViolation", "ConfigError", "DegenerateStateError",
    "DimensionError", "DivergenceError",
    "DisturbanceModel", "PlantModel", "make_builtin_plant", "step",
    "CostSummary", "SimConfig", "SimTrace", "empirical_cost",
    "improvement_pct", "monte_carlo", "run_episode",
    "CertificateInputs", "StabilityReport", "evaluate",
]

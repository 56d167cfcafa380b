"""Pointing error-rate prediction from pointer/target trajectory logs.

Pipeline: parse a session log (trajlog), segment each trial's speed profile
into submovements and extract the temporal predictor variables (kinematics),
predict per-trial error rates from the click-timing model (icp), fit the
model's four parameters to binned error rates (fitting), and generate
synthetic sessions with exact ground truth for validation (simulate).
"""

from .baselines import HuangParams, WobbrockParams, huang_endpoint_dist, huang_er_circular, wobbrock_er
from .errors import (
    ClickpointError,
    ConfigError,
    DegenerateTrialError,
    DomainError,
    FitError,
    NoSubmovementError,
    ParseError,
    ValidationError,
)
from .fitting import (
    BinnedPoint,
    FitResult,
    ParticipantFit,
    bin_trials,
    crossval,
    fit_icp,
    fit_per_participant,
    fit_wobbrock,
    icp_loss,
)
from .icp import ClickTimingDist, IcpParams, predict_er, predict_trial, timing_distribution
from .kinematics import (
    SpeedProfile,
    SubMovement,
    TrialFeatures,
    extract_features,
    persistence_extrema,
    segment_submovements,
    smooth,
    speed_profile,
    trial_features,
)
from .simulate import (
    GroundTruthTrial,
    ScenarioConfig,
    parse_scenario,
    read_ground_truth,
    simulate_session,
    write_ground_truth,
    write_scenario,
)
from .trajlog import SessionLog, TrajectorySample, TrialLog, parse_session, validate_session, write_session

__version__ = "0.1.0"

__all__ = [
    "BinnedPoint",
    "ClickTimingDist",
    "ClickpointError",
    "ConfigError",
    "DegenerateTrialError",
    "DomainError",
    "FitError",
    "FitResult",
    "GroundTruthTrial",
    "HuangParams",
    "IcpParams",
    "NoSubmovementError",
    "ParseError",
    "ParticipantFit",
    "ScenarioConfig",
    "SessionLog",
    "SpeedProfile",
    "SubMovement",
    "TrajectorySample",
    "TrialFeatures",
    "TrialLog",
    "ValidationError",
    "WobbrockParams",
    "bin_trials",
    "crossval",
    "extract_features",
    "fit_icp",
    "fit_per_participant",
    "fit_wobbrock",
    "huang_endpoint_dist",
    "huang_er_circular",
    "icp_loss",
    "parse_scenario",
    "parse_session",
    "persistence_extrema",
    "predict_er",
    "predict_trial",
    "read_ground_truth",
    "segment_submovements",
    "simulate_session",
    "smooth",
    "speed_profile",
    "timing_distribution",
    "trial_features",
    "validate_session",
    "wobbrock_er",
    "write_ground_truth",
    "write_scenario",
    "write_session",
]

"""Simulation and analysis of dummy-sample attack detection for over-the-air computation."""
from .attacker import AttackKind, AttackStrategy, generate_attack
from .channel import (ChannelRealization, Geometry, PowerBudget, amplitude_scaling_factor,
                      apply_participation, place_nodes, realize_channels)
from .config import SystemConfig, load_config
from .detector import (Decision, DetectorStats, Hypothesis, calibrate_threshold, decide,
                       deflection_coefficient, energy_statistic, theoretical_moments)
from .dummy_schemes import (CompositeBlock, DetectionVector, SchemeKind, build_correlated,
                            build_uncorrelated, draw_dummy_indices, extract_detection_vector)
from .errors import ConfigError, InvalidBlockError, ParameterError
from .numerics import (RngStream, erlang_quantile, erlang_tail, sample_complex_gaussian,
                       sample_haar_unitary)
from .ota_core import ReceivedBlock, TransmitBlock, postprocess, precode, superpose
from .trials import TrialBatch, TrialRecord, run_trial, run_trials

__version__ = "0.1.0"

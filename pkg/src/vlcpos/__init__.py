"""Compressed-sensing indoor positioning with visible light LED signatures."""

__version__ = "0.1.0"

from .channel import ChannelParams, channel_gain, concentrator_gain, gain_vector, lambertian_order
from .config import RunConfig, parse_config
from .evaluation import (
    SweepResult,
    TrialResult,
    min_mpe_oracle,
    run_sweep,
    run_trial,
    sre,
)
from .geometry import SceneGeometry, coverage_indicator, coverage_vector, k_max, led_grid, sparsity_map
from .positioning import NoDetectionError, PositionEstimate, prox, recover_position
from .recovery import SparseEstimate, omp, support_of
from .signal import ReceivedSignal, compose_x, generate_signatures, noise_variance_for_snr, synthesize

"""Simulator and analysis toolkit for a threshold-based EOG digital front end."""

from .adc import AdcConfig, SampleRecord, SampleStream, acquire, code_to_volts, lsb, quantize
from .afe import (
    AfeConfig,
    FilterCoefficients,
    amplify_chain,
    design_filter,
    ina_gain,
    magnitude_response,
    stage2_gain,
    total_gain,
)
from .config import ChainConfig, config_from_dict, load_config, preset
from .detect import (
    DetectionEvent,
    DetectorConfig,
    EventDetector,
    detect_events,
    digital_output,
    find_peaks,
)
from .metrics import MetricsReport, accuracy_report, mean_latency, snr_db
from .noise import NoiseConfig, add_drift, add_powerline, add_white, apply_noise, drl_attenuate
from .pipeline import analyse, simulate
from .serial_io import SerialLog, parse_serial_csv, write_serial_csv
from .signal_model import (
    CrpModel,
    GazeScenario,
    GazeTrace,
    RawSignal,
    Saccade,
    alternating_scenario,
    gaze_to_differential,
    render_gaze_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AdcConfig",
    "AfeConfig",
    "ChainConfig",
    "CrpModel",
    "DetectionEvent",
    "DetectorConfig",
    "EventDetector",
    "FilterCoefficients",
    "GazeScenario",
    "GazeTrace",
    "MetricsReport",
    "NoiseConfig",
    "RawSignal",
    "Saccade",
    "SampleRecord",
    "SampleStream",
    "SerialLog",
    "accuracy_report",
    "acquire",
    "add_drift",
    "add_powerline",
    "add_white",
    "alternating_scenario",
    "amplify_chain",
    "analyse",
    "apply_noise",
    "code_to_volts",
    "config_from_dict",
    "design_filter",
    "detect_events",
    "digital_output",
    "drl_attenuate",
    "find_peaks",
    "gaze_to_differential",
    "ina_gain",
    "load_config",
    "lsb",
    "magnitude_response",
    "mean_latency",
    "parse_serial_csv",
    "preset",
    "quantize",
    "render_gaze_trace",
    "simulate",
    "snr_db",
    "stage2_gain",
    "total_gain",
    "write_serial_csv",
]

"""End-to-end chain: scenario -> electrodes -> AFE -> ADC -> detector -> metrics."""

from __future__ import annotations

from dataclasses import dataclass

from .adc import Acquirer, SampleStream
from .afe import AfeOutput, amplify_chain, design_filter
from .config import ChainConfig
from .detect import DetectionEvent, detect_events
from .metrics import MetricsReport, match_truth, scenario_truth, snr_db
from .noise import GENERATOR_ID, apply_noise
from .serial_io import SerialLog
from .signal_model import (
    GazeScenario,
    GazeTrace,
    RawSignal,
    alternating_scenario,
    gaze_to_differential,
    render_gaze_trace,
)


@dataclass(frozen=True)
class SimulationResult:
    config: ChainConfig
    scenario: GazeScenario
    trace: GazeTrace
    raw: RawSignal
    analog: AfeOutput
    stream: SampleStream
    adc_clamp_count: int
    config_hash: str

    def serial_log(self) -> SerialLog:
        adc = self.config.adc
        return SerialLog(
            records=self.stream,
            sample_rate=adc.sample_rate,
            v_ref=adc.v_ref,
            bits=adc.bits,
            source="eogforge-sim",
            extra={"config_hash": self.config_hash, "seed": str(self.config.seed)},
        )

    def truth(self) -> list[tuple[float, str]]:
        return scenario_truth(self.scenario)


def resolve_scenario(config: ChainConfig) -> GazeScenario:
    if config.scenario is None:
        return alternating_scenario()
    return GazeScenario.from_json(config.scenario)


def simulate(config: ChainConfig, scenario: GazeScenario | None = None) -> SimulationResult:
    if scenario is None:
        scenario = resolve_scenario(config)
    trace = render_gaze_trace(scenario, config.sim_rate)
    raw = apply_noise(gaze_to_differential(trace, config.crp), config.noise)
    coeffs = design_filter(config.afe, config.sim_rate)
    analog = amplify_chain(raw, config.afe, coeffs)
    acq = Acquirer(config.sim_rate, config.adc)
    stream = acq.push(analog.volts)
    return SimulationResult(
        config=config,
        scenario=scenario,
        trace=trace,
        raw=raw,
        analog=analog,
        stream=stream,
        adc_clamp_count=acq.clamp_count,
        config_hash=config.hash(scenario.to_dict()),
    )


def provenance(config: ChainConfig, config_hash: str) -> dict:
    return {
        "config_hash": config_hash,
        "seed": config.seed,
        "generator": GENERATOR_ID,
        "preset": config.preset,
        "filter_primed": config.afe.prime_filter,
    }


def analyse(
    stream: SampleStream,
    config: ChainConfig,
    truth: list[tuple[float, str]] | None = None,
    config_hash: str | None = None,
) -> tuple[list[DetectionEvent], MetricsReport]:
    """Detection plus metrics; latency/accuracy only when ``truth`` is given."""
    events = detect_events(stream, config.detector)
    snr = snr_db(stream.volts)
    acc = match_truth(truth, events, config.match_window) if truth is not None else None
    report = MetricsReport.build(
        snr, events, acc, provenance(config, config_hash or config.hash())
    )
    return events, report

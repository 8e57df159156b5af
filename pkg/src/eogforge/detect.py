"""Threshold event detection on the reconstructed voltage stream.

The bare comparator (above the upper baseline -> 1, else 0) is extended to
two polarities with debounce, hysteresis and a refractory period. Setting
``debounce_samples=1``, ``hysteresis=0`` and ``refractory=0`` recovers the
plain comparator.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy import signal as sps

from .adc import SampleStream
from .errors import InvalidConfigError, StreamError

UP = "UP"
DOWN = "DOWN"


@dataclass(frozen=True)
class DetectorConfig:
    up_threshold: float = 0.0500
    down_threshold: float = 0.0400
    # None -> 10 % of the threshold gap
    hysteresis: float | None = None
    debounce_samples: int = 3
    refractory: float = 0.2

    def __post_init__(self):
        if not (math.isfinite(self.up_threshold) and math.isfinite(self.down_threshold)):
            raise InvalidConfigError("thresholds must be finite", "detector.up_threshold")
        if not self.down_threshold < self.up_threshold:
            raise InvalidConfigError("must be below up_threshold", "detector.down_threshold")
        if self.hysteresis is not None and not self.hysteresis >= 0:
            raise InvalidConfigError("must be >= 0", "detector.hysteresis")
        if (
            isinstance(self.debounce_samples, bool)
            or int(self.debounce_samples) != self.debounce_samples
            or self.debounce_samples < 1
        ):
            raise InvalidConfigError("must be an integer >= 1", "detector.debounce_samples")
        if not self.refractory >= 0:
            raise InvalidConfigError("must be >= 0", "detector.refractory")

    @classmethod
    def fig6(cls) -> "DetectorConfig":
        return cls(up_threshold=0.0500, down_threshold=0.0400)

    @property
    def hysteresis_v(self) -> float:
        if self.hysteresis is None:
            return 0.1 * (self.up_threshold - self.down_threshold)
        return self.hysteresis

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DetectionEvent:
    onset: float
    polarity: str
    peak_value: float
    peak_time: float
    # timestamp of the sample that closed the event; None if still open at end of stream
    offset: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


class EventDetector:
    """Per-stream finite-state machine; feed chunks with :meth:`push`."""

    def __init__(self, config: DetectorConfig = DetectorConfig()):
        self.config = config
        self._up = config.up_threshold
        self._down = config.down_threshold
        self._up_release = config.up_threshold - config.hysteresis_v
        self._down_release = config.down_threshold + config.hysteresis_v
        self._need = int(config.debounce_samples)
        self._last_t = -math.inf
        self._last_close: float | None = None
        self._open: str | None = None
        self._onset = 0.0
        self._peak_v = 0.0
        self._peak_t = 0.0
        self._run_pol: str | None = None
        self._run_len = 0
        self._run_start = 0.0
        self._run_peak_v = 0.0
        self._run_peak_t = 0.0

    def _reset_run(self):
        self._run_pol = None
        self._run_len = 0

    def _step_idle(self, t, v):
        if self._last_close is not None and t < self._last_close + self.config.refractory:
            self._reset_run()
            return
        if v >= self._up:
            pol = UP
        elif v < self._down:
            pol = DOWN
        else:
            self._reset_run()
            return
        if pol != self._run_pol:
            self._run_pol, self._run_len = pol, 0
            self._run_start = t
            self._run_peak_v, self._run_peak_t = v, t
        elif (v > self._run_peak_v) if pol == UP else (v < self._run_peak_v):
            self._run_peak_v, self._run_peak_t = v, t
        self._run_len += 1
        if self._run_len >= self._need:
            self._open = pol
            self._onset = self._run_start
            self._peak_v, self._peak_t = self._run_peak_v, self._run_peak_t
            self._reset_run()

    def push(self, stream: SampleStream) -> list[DetectionEvent]:
        """Consume a chunk; return events that closed inside it."""
        closed = []
        for t, v in zip(stream.timestamps.tolist(), stream.volts.tolist()):
            if not t > self._last_t:
                raise StreamError(f"timestamp {t!r} does not follow {self._last_t!r}")
            self._last_t = t
            if self._open == UP:
                if v < self._up_release:
                    closed.append(self._close(t))
                elif v > self._peak_v:
                    self._peak_v, self._peak_t = v, t
                    continue
                else:
                    continue
            elif self._open == DOWN:
                if v > self._down_release:
                    closed.append(self._close(t))
                elif v < self._peak_v:
                    self._peak_v, self._peak_t = v, t
                    continue
                else:
                    continue
            self._step_idle(t, v)
        return closed

    def _close(self, t) -> DetectionEvent:
        ev = DetectionEvent(self._onset, self._open, self._peak_v, self._peak_t, offset=t)
        self._open = None
        self._last_close = t
        return ev

    def finish(self) -> list[DetectionEvent]:
        """Flush an event still open at end of stream (``offset=None``)."""
        if self._open is None:
            return []
        ev = DetectionEvent(self._onset, self._open, self._peak_v, self._peak_t, offset=None)
        self._open = None
        return [ev]


def detect_events(
    stream: SampleStream | Iterable[SampleStream], config: DetectorConfig = DetectorConfig()
) -> list[DetectionEvent]:
    """Detect gaze events in a stream, or in an iterable of consecutive chunks."""
    det = EventDetector(config)
    chunks = [stream] if isinstance(stream, SampleStream) else stream
    events = []
    for chunk in chunks:
        events.extend(det.push(chunk))
    events.extend(det.finish())
    return events


def events_to_digital(stream: SampleStream, events: list[DetectionEvent]) -> np.ndarray:
    out = np.zeros(len(stream), dtype=np.int8)
    t = stream.timestamps
    for ev in events:
        if ev.polarity != UP:
            continue
        end = math.inf if ev.offset is None else ev.offset
        out[(t >= ev.onset) & (t < end)] = 1
    return out


def digital_output(stream: SampleStream, config: DetectorConfig = DetectorConfig()) -> np.ndarray:
    """Per-sample 1 while an UP event is open, else 0."""
    return events_to_digital(stream, detect_events(stream, config))


def find_peaks(stream: SampleStream, min_prominence: float) -> list[tuple[float, float]]:
    """Local maxima with at least ``min_prominence``; plateaus report their first sample."""
    v = stream.volts
    if v.size < 3:
        return []
    idx, props = sps.find_peaks(v, prominence=min_prominence, plateau_size=1)
    first = props["left_edges"]
    return [(float(stream.timestamps[i]), float(v[i])) for i in first]

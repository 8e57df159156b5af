"""Gaze stimulus and the corneal-retinal potential (CRP) electrode model.

The eye is treated as a dipole whose projection onto a vertical electrode
pair is linear in gaze angle over +/-30 degrees. Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfigError, InvalidScenarioError

MAX_ANGLE_DEG = 30.0
DEFAULT_SACCADE_DURATION = 0.05
# 3500 uV at the 30 degree extreme
DEFAULT_SENSITIVITY_UV = 3500.0 / 30.0


def _check_angle(angle, what):
    if not math.isfinite(angle) or abs(angle) > MAX_ANGLE_DEG:
        raise InvalidScenarioError(f"{what} {angle!r} deg outside +/-{MAX_ANGLE_DEG:g}")


@dataclass(frozen=True)
class Saccade:
    onset: float
    target_angle: float
    transition_duration: float = DEFAULT_SACCADE_DURATION

    def __post_init__(self):
        if not math.isfinite(self.onset) or self.onset < 0:
            raise InvalidScenarioError(f"saccade onset must be >= 0, got {self.onset!r}")
        _check_angle(self.target_angle, "target_angle")
        if not self.transition_duration > 0:
            raise InvalidScenarioError(
                f"transition_duration must be > 0, got {self.transition_duration!r}"
            )

    @property
    def end(self) -> float:
        return self.onset + self.transition_duration


@dataclass(frozen=True)
class GazeScenario:
    """Ordered, non-overlapping saccades over a fixed recording window."""

    total_duration: float
    saccades: tuple[Saccade, ...] = ()
    initial_angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "saccades", tuple(self.saccades))
        if not self.total_duration > 0:
            raise InvalidScenarioError(f"total_duration must be > 0, got {self.total_duration!r}")
        _check_angle(self.initial_angle, "initial_angle")
        prev = None
        for i, s in enumerate(self.saccades):
            if prev is not None:
                if s.onset <= prev.onset:
                    raise InvalidScenarioError(f"saccade {i}: onsets must be strictly increasing")
                if s.onset < prev.end:
                    raise InvalidScenarioError(
                        f"saccade {i} starts at {s.onset:g} s before saccade {i - 1} "
                        f"finishes at {prev.end:g} s"
                    )
            if s.end > self.total_duration:
                raise InvalidScenarioError(
                    f"saccade {i} ends at {s.end:g} s, past total_duration {self.total_duration:g} s"
                )
            prev = s

    def polarities(self) -> list[str | None]:
        """'UP' / 'DOWN' per saccade relative to the preceding angle; None when unchanged."""
        out = []
        angle = self.initial_angle
        for s in self.saccades:
            if s.target_angle > angle:
                out.append("UP")
            elif s.target_angle < angle:
                out.append("DOWN")
            else:
                out.append(None)
            angle = s.target_angle
        return out

    def to_dict(self) -> dict:
        return {
            "total_duration_s": self.total_duration,
            "initial_angle_deg": self.initial_angle,
            "saccades": [
                {
                    "onset_s": s.onset,
                    "target_angle_deg": s.target_angle,
                    "transition_duration_s": s.transition_duration,
                }
                for s in self.saccades
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GazeScenario":
        try:
            saccades = [
                Saccade(
                    onset=float(s["onset_s"]),
                    target_angle=float(s["target_angle_deg"]),
                    transition_duration=float(
                        s.get("transition_duration_s", DEFAULT_SACCADE_DURATION)
                    ),
                )
                for s in data.get("saccades", [])
            ]
            return cls(
                total_duration=float(data["total_duration_s"]),
                saccades=tuple(saccades),
                initial_angle=float(data.get("initial_angle_deg", 0.0)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidScenarioError(f"malformed scenario: {exc!r}") from exc

    @classmethod
    def from_json(cls, path) -> "GazeScenario":
        with open(Path(path), encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidScenarioError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidScenarioError(f"{path}: scenario must be a JSON object")
        return cls.from_dict(data)


def alternating_scenario(
    n_saccades: int = 10,
    amplitude: float = 30.0,
    interval: float = 2.0,
    first_onset: float = 1.0,
    transition_duration: float = DEFAULT_SACCADE_DURATION,
    tail: float = 1.0,
) -> GazeScenario:
    """Gaze alternates +amplitude, -amplitude, ... starting from straight ahead."""
    saccades = tuple(
        Saccade(
            onset=first_onset + k * interval,
            target_angle=amplitude if k % 2 == 0 else -amplitude,
            transition_duration=transition_duration,
        )
        for k in range(n_saccades)
    )
    total = first_onset + (n_saccades - 1) * interval + transition_duration + tail
    return GazeScenario(total_duration=total, saccades=saccades)


@dataclass(frozen=True)
class GazeTrace:
    sample_rate: float
    angles: np.ndarray = field(repr=False)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if np.any(np.abs(angles) > MAX_ANGLE_DEG):
            raise InvalidScenarioError("gaze trace leaves the +/-30 degree range")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.angles.size) / self.sample_rate


@dataclass(frozen=True)
class CrpModel:
    """Linear angle-to-voltage map, sensitivity in microvolts per degree."""

    sensitivity: float = DEFAULT_SENSITIVITY_UV

    def __post_init__(self):
        if not (math.isfinite(self.sensitivity) and self.sensitivity > 0):
            raise InvalidConfigError("must be > 0", "crp.sensitivity")

    @classmethod
    def from_max_amplitude(cls, max_uv: float) -> "CrpModel":
        return cls(sensitivity=max_uv / MAX_ANGLE_DEG)

    @property
    def max_amplitude_uv(self) -> float:
        return self.sensitivity * MAX_ANGLE_DEG


@dataclass(frozen=True)
class RawSignal:
    """Electrode-level voltages: differential and common-mode paths, in volts."""

    sample_rate: float
    differential: np.ndarray = field(repr=False)
    common_mode: np.ndarray = field(repr=False)

    def __post_init__(self):
        diff = np.array(self.differential, dtype=float)
        cm = np.array(self.common_mode, dtype=float)
        if diff.shape != cm.shape or diff.ndim != 1:
            raise ValueError("differential and common_mode must be 1-D and equal length")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be > 0")
        diff.setflags(write=False)
        cm.setflags(write=False)
        object.__setattr__(self, "differential", diff)
        object.__setattr__(self, "common_mode", cm)

    def __len__(self):
        return self.differential.size

    def replace(self, differential=None, common_mode=None) -> "RawSignal":
        return RawSignal(
            self.sample_rate,
            self.differential if differential is None else differential,
            self.common_mode if common_mode is None else common_mode,
        )


def render_gaze_trace(scenario: GazeScenario, sample_rate: float) -> GazeTrace:
    """Sample the piecewise hold / linear-ramp gaze trajectory.

    Before a saccade's onset the angle holds its previous value; it then
    ramps linearly to the target over ``transition_duration`` and holds.
    """
    if not sample_rate > 0:
        raise InvalidConfigError("must be > 0", "sample_rate")

    n = int(round(scenario.total_duration * sample_rate))
    t = np.arange(n) / sample_rate
    angles = np.full(n, float(scenario.initial_angle))
    prev = float(scenario.initial_angle)
    for s in scenario.saccades:
        frac = np.clip((t - s.onset) / s.transition_duration, 0.0, 1.0)
        ramp = prev + (s.target_angle - prev) * frac
        ramp = np.clip(ramp, min(prev, s.target_angle), max(prev, s.target_angle))
        angles = np.where(t >= s.onset, ramp, angles)
        prev = s.target_angle
    return GazeTrace(sample_rate=float(sample_rate), angles=angles)


def gaze_to_differential(trace: GazeTrace, model: CrpModel = CrpModel()) -> RawSignal:
    """Differential electrode voltage (V) for each gaze sample; common mode is zero."""
    diff = trace.angles * (model.sensitivity * 1e-6)
    return RawSignal(trace.sample_rate, diff, np.zeros_like(diff))

"""Interference sources: powerline pickup, baseline drift and broadband noise.

Powerline pickup enters on the common-mode path (the body acts as an
antenna), so the driven-right-leg stage and the amplifier CMRR act on it.
Drift and white noise land on the differential path. Each random source
draws from its own generator stream derived from ``NoiseConfig.seed``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidConfigError
from .signal_model import RawSignal

GENERATOR_ID = "numpy.random.PCG64/SeedSequence"

_DRIFT_STREAM = 1
_WHITE_STREAM = 2


@dataclass(frozen=True)
class NoiseConfig:
    powerline_freq: float = 60.0
    powerline_amplitude: float = 10e-3
    powerline_phase: float = 0.0
    # share of the powerline amplitude also injected differentially (imbalance)
    powerline_differential_fraction: float = 0.0
    drift_step_std: float = 0.5e-6
    drift_bound: float = 100e-6
    white_noise_std: float = 5e-6
    drl_factor: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("powerline_amplitude", "drift_step_std", "drift_bound", "white_noise_std"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidConfigError("must be a finite value >= 0", f"noise.{name}")
        if not self.powerline_freq > 0:
            raise InvalidConfigError("must be > 0", "noise.powerline_freq")
        if not 0.0 <= self.powerline_differential_fraction <= 1.0:
            raise InvalidConfigError("must lie in [0, 1]", "noise.powerline_differential_fraction")
        if not self.drl_factor >= 1.0:
            raise InvalidConfigError("must be >= 1", "noise.drl_factor")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise InvalidConfigError("must be an integer", "noise.seed")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfigError("must fit in 64 unsigned bits", "noise.seed")

    @classmethod
    def silent(cls, seed: int = 0) -> "NoiseConfig":
        return cls(
            powerline_amplitude=0.0, drift_step_std=0.0, white_noise_std=0.0, seed=seed
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))


def add_powerline(signal: RawSignal, config: NoiseConfig) -> RawSignal:
    if config.powerline_amplitude == 0:
        return signal
    t = np.arange(len(signal)) / signal.sample_rate
    hum = config.powerline_amplitude * np.sin(
        2 * np.pi * config.powerline_freq * t + config.powerline_phase
    )
    cm = signal.common_mode + hum
    if config.powerline_differential_fraction > 0:
        diff = signal.differential + config.powerline_differential_fraction * hum
        return signal.replace(differential=diff, common_mode=cm)
    return signal.replace(common_mode=cm)


def drift_walk(n: int, step_std: float, bound: float, seed: int) -> np.ndarray:
    """Seeded random walk, clamped to +/-bound after every step."""
    steps = _rng(seed, _DRIFT_STREAM).normal(0.0, step_std, size=n)
    out = np.empty(n)
    w = 0.0
    for i, step in enumerate(steps.tolist()):
        w += step
        if w > bound:
            w = bound
        elif w < -bound:
            w = -bound
        out[i] = w
    return out


def add_drift(signal: RawSignal, config: NoiseConfig) -> RawSignal:
    if config.drift_step_std == 0:
        return signal
    walk = drift_walk(len(signal), config.drift_step_std, config.drift_bound, config.seed)
    return signal.replace(differential=signal.differential + walk)


def add_white(signal: RawSignal, config: NoiseConfig) -> RawSignal:
    if config.white_noise_std == 0:
        return signal
    noise = _rng(config.seed, _WHITE_STREAM).normal(0.0, config.white_noise_std, size=len(signal))
    return signal.replace(differential=signal.differential + noise)


def drl_attenuate(signal: RawSignal, attenuation_factor: float) -> RawSignal:
    """Driven-right-leg feedback: divide the common-mode path by ``attenuation_factor``."""
    if not attenuation_factor >= 1:
        raise InvalidConfigError(f"must be >= 1, got {attenuation_factor!r}", "drl_factor")
    if attenuation_factor == 1:
        return signal
    return signal.replace(common_mode=signal.common_mode / attenuation_factor)


def apply_noise(signal: RawSignal, config: NoiseConfig) -> RawSignal:
    """All interference sources, then DRL attenuation of the common mode."""
    out = add_powerline(signal, config)
    out = add_drift(out, config)
    out = add_white(out, config)
    return drl_attenuate(out, config.drl_factor)

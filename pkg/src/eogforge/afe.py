"""Analog front end: instrumentation amplifier, band-pass, second stage, rails.

Signal order through :func:`amplify_chain`::

    input attenuator -> INA (differential gain + CMRR leakage)
        -> first-order high-pass -> first-order low-pass
        -> non-inverting stage 2 -> hard clip at +/-supply_rail

The band-pass sections are discretised with the bilinear transform, each
prewarped at its own cutoff so the digital -3 dB points land exactly on
``fc_hp`` and ``fc_lp``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal as sps

from .errors import AliasingError, InvalidConfigError
from .signal_model import RawSignal


@dataclass(frozen=True)
class AfeConfig:
    r2: float = 330.0
    r_gain: float = 220.0
    r4: float = 100_000.0
    r3: float = 10.0
    # stage-2 non-inverting amp: 1 + stage2_r2 / stage2_r1 = 1.25
    stage2_r2: float = 2_500.0
    stage2_r1: float = 10_000.0
    fc_hp: float = 0.5
    fc_lp: float = 30.0
    supply_rail: float = 5.0
    cmrr_db: float = 80.0
    # passive divider ahead of the INA; 1 means no attenuation
    input_attenuation: float = 1.0
    prime_filter: bool = False

    def __post_init__(self):
        for name in ("r_gain", "r4", "r3", "stage2_r1"):
            if not getattr(self, name) > 0:
                raise InvalidConfigError("must be > 0", f"afe.{name}")
        # r2 == 0 (shorted) collapses the INA to its difference stage
        for name in ("r2", "stage2_r2"):
            if not getattr(self, name) >= 0:
                raise InvalidConfigError("must be >= 0", f"afe.{name}")
        if not 0 < self.fc_hp < self.fc_lp:
            raise InvalidConfigError(
                f"need 0 < fc_hp < fc_lp, got {self.fc_hp!r}, {self.fc_lp!r}", "afe.fc_hp"
            )
        if not self.supply_rail > 0:
            raise InvalidConfigError("must be > 0", "afe.supply_rail")
        if not math.isfinite(self.cmrr_db):
            raise InvalidConfigError("must be finite", "afe.cmrr_db")
        if not self.input_attenuation >= 1:
            raise InvalidConfigError("must be >= 1", "afe.input_attenuation")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FirstOrderSection:
    """y[n] = b0*x[n] + b1*x[n-1] - a1*y[n-1]"""

    b0: float
    b1: float
    a1: float

    @property
    def b(self):
        return np.array([self.b0, self.b1])

    @property
    def a(self):
        return np.array([1.0, self.a1])


@dataclass(frozen=True)
class FilterCoefficients:
    highpass: FirstOrderSection
    lowpass: FirstOrderSection
    sample_rate: float

    def __post_init__(self):
        for sec in (self.highpass, self.lowpass):
            if not abs(sec.a1) < 1:
                raise InvalidConfigError("unstable section: |a1| >= 1", "afe.filter")

    def sos(self) -> np.ndarray:
        """Second-order-section matrix (two first-order rows) for scipy."""
        rows = []
        for sec in (self.highpass, self.lowpass):
            rows.append([sec.b0, sec.b1, 0.0, 1.0, sec.a1, 0.0])
        return np.array(rows)


def _require_positive(config: AfeConfig, *names):
    for name in names:
        if not getattr(config, name) > 0:
            raise InvalidConfigError("must be > 0", f"afe.{name}")


def ina_gain(config: AfeConfig) -> float:
    """Three-op-amp INA gain (1 + 2*R2/Rgain) * (R4/R3)."""
    _require_positive(config, "r_gain", "r4", "r3")
    if config.r2 < 0:
        raise InvalidConfigError("must be >= 0", "afe.r2")
    return (1.0 + 2.0 * config.r2 / config.r_gain) * (config.r4 / config.r3)


def stage2_gain(config: AfeConfig) -> float:
    _require_positive(config, "stage2_r1")
    if config.stage2_r2 < 0:
        raise InvalidConfigError("must be >= 0", "afe.stage2_r2")
    return 1.0 + config.stage2_r2 / config.stage2_r1


def total_gain(config: AfeConfig) -> float:
    return ina_gain(config) * stage2_gain(config)


def _prewarp(fc: float, fs: float) -> float:
    return math.tan(math.pi * fc / fs)


def design_filter(config: AfeConfig, sample_rate: float) -> FilterCoefficients:
    if not sample_rate > 2 * config.fc_lp:
        raise AliasingError(
            f"sample_rate {sample_rate!r} Hz must exceed 2*fc_lp = {2 * config.fc_lp:g} Hz",
            "sample_rate",
        )
    k = _prewarp(config.fc_hp, sample_rate)
    hp = FirstOrderSection(b0=1 / (1 + k), b1=-1 / (1 + k), a1=(k - 1) / (k + 1))
    k = _prewarp(config.fc_lp, sample_rate)
    lp = FirstOrderSection(b0=k / (1 + k), b1=k / (1 + k), a1=(k - 1) / (k + 1))
    return FilterCoefficients(highpass=hp, lowpass=lp, sample_rate=float(sample_rate))


def magnitude_response(config: AfeConfig, f) -> np.ndarray | float:
    """Continuous-time |H(f)| of the first-order HP/LP cascade."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise InvalidConfigError("frequency must be >= 0", "f")
    x = f / config.fc_hp
    hp = x / np.sqrt(1 + x * x)
    lp = 1 / np.sqrt(1 + (f / config.fc_lp) ** 2)
    out = hp * lp
    return float(out) if out.ndim == 0 else out


def digital_response(coeffs: FilterCoefficients, f) -> np.ndarray:
    """|H(e^jw)| of the designed discrete cascade at frequencies ``f`` (Hz)."""
    _, h = sps.sosfreqz(coeffs.sos(), worN=np.atleast_1d(np.asarray(f, float)), fs=coeffs.sample_rate)
    return np.abs(h)


def bandpass(x, coeffs: FilterCoefficients, prime: bool = False) -> np.ndarray:
    """Run the HP->LP cascade from zero state.

    With ``prime`` the filters first consume a time-reversed copy of the
    leading samples (up to five HP time constants) so the startup step
    transient is largely absorbed; that prefix is discarded.
    """
    x = np.asarray(x, dtype=float)
    if not prime or x.size < 2:
        return sps.sosfilt(coeffs.sos(), x)
    hp = coeffs.highpass
    # HP pole radius -a1 -> time constant in samples
    tau = -1.0 / math.log(-hp.a1) if -1 < hp.a1 < 0 else 1.0
    n_pre = min(x.size - 1, int(math.ceil(5 * tau)))
    prefix = x[1 : n_pre + 1][::-1]
    y = sps.sosfilt(coeffs.sos(), np.concatenate([prefix, x]))
    return y[n_pre:]


@dataclass(frozen=True)
class AfeOutput:
    sample_rate: float
    volts: np.ndarray
    clipped: np.ndarray

    @property
    def clip_count(self) -> int:
        return int(np.count_nonzero(self.clipped))


def amplify_chain(
    signal: RawSignal, config: AfeConfig, coeffs: FilterCoefficients | None = None
) -> AfeOutput:
    """Push a raw electrode signal through the analog chain.

    ``coeffs=None`` bypasses the band-pass (pure gain + clip), which is
    handy for checking gain arithmetic in isolation.
    """
    if coeffs is not None and not math.isclose(coeffs.sample_rate, signal.sample_rate):
        raise InvalidConfigError(
            f"filter designed for {coeffs.sample_rate:g} Hz, signal is {signal.sample_rate:g} Hz",
            "sample_rate",
        )
    g1 = ina_gain(config)
    g_cm = g1 / 10 ** (config.cmrr_db / 20)
    diff = signal.differential / config.input_attenuation
    cm = signal.common_mode / config.input_attenuation
    x = g1 * diff + g_cm * cm
    if coeffs is not None:
        x = bandpass(x, coeffs, prime=config.prime_filter)
    y = stage2_gain(config) * x
    rail = config.supply_rail
    clipped = np.abs(y) > rail
    return AfeOutput(signal.sample_rate, np.clip(y, -rail, rail), clipped)

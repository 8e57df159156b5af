"""Microcontroller-style acquisition: decimate, quantise to N-bit codes, reconstruct."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import InvalidConfigError, ResamplingError

ROUNDING_MODES = ("floor", "round")


@dataclass(frozen=True)
class AdcConfig:
    v_ref: float = 5.0
    bits: int = 10
    sample_rate: float = 256.0
    # volts added before conversion; lifts a bipolar signal into 0..v_ref
    input_offset: float = 0.0
    rounding: str = "floor"

    def __post_init__(self):
        if not (math.isfinite(self.v_ref) and self.v_ref > 0):
            raise InvalidConfigError("must be > 0", "adc.v_ref")
        if isinstance(self.bits, bool) or int(self.bits) != self.bits or not 1 <= self.bits <= 16:
            raise InvalidConfigError("must be an integer in [1, 16]", "adc.bits")
        if not self.sample_rate > 0:
            raise InvalidConfigError("must be > 0", "adc.sample_rate")
        if not math.isfinite(self.input_offset):
            raise InvalidConfigError("must be finite", "adc.input_offset")
        if self.rounding not in ROUNDING_MODES:
            raise InvalidConfigError(f"must be one of {ROUNDING_MODES}", "adc.rounding")

    @property
    def max_code(self) -> int:
        return 2 ** int(self.bits) - 1

    def to_dict(self) -> dict:
        return asdict(self)


def lsb(config: AdcConfig) -> float:
    return config.v_ref / 2 ** int(config.bits)


def quantize_with_flag(v, config: AdcConfig):
    """Return ``(codes, clamped)``; ``clamped`` marks inputs outside the code range."""
    v = np.asarray(v, dtype=float)
    scaled = (v + config.input_offset) / lsb(config)
    raw = np.floor(scaled) if config.rounding == "floor" else np.floor(scaled + 0.5)
    clamped = (raw < 0) | (raw > config.max_code)
    codes = np.clip(raw, 0, config.max_code).astype(np.int64)
    if codes.ndim == 0:
        return int(codes), bool(clamped)
    return codes, clamped


def quantize(v, config: AdcConfig):
    return quantize_with_flag(v, config)[0]


def code_to_volts(code, config: AdcConfig):
    out = np.asarray(code, dtype=float) * lsb(config)
    return float(out) if out.ndim == 0 else out


class SampleRecord(NamedTuple):
    timestamp: float
    code: int
    volts: float


@dataclass(frozen=True)
class SampleStream:
    """Column-oriented run of SampleRecords (timestamps in s, codes, volts)."""

    timestamps: np.ndarray
    codes: np.ndarray
    volts: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        codes = np.asarray(self.codes, dtype=np.int64)
        volts = np.asarray(self.volts, dtype=float)
        if not ts.shape == codes.shape == volts.shape or ts.ndim != 1:
            raise ValueError("timestamps, codes and volts must be equal-length 1-D arrays")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "volts", volts)

    @classmethod
    def empty(cls) -> "SampleStream":
        return cls(np.empty(0), np.empty(0, np.int64), np.empty(0))

    @classmethod
    def from_codes(cls, timestamps, codes, config: AdcConfig) -> "SampleStream":
        codes = np.asarray(codes, dtype=np.int64)
        return cls(timestamps, codes, code_to_volts(codes, config) if codes.size else np.empty(0))

    @classmethod
    def from_volts(cls, volts, sample_rate: float) -> "SampleStream":
        """Analysis-only stream: volts at k/sample_rate, codes zeroed."""
        volts = np.asarray(volts, dtype=float)
        return cls(np.arange(volts.size) / sample_rate, np.zeros(volts.size, np.int64), volts)

    @classmethod
    def concat(cls, parts) -> "SampleStream":
        parts = list(parts)
        if not parts:
            return cls.empty()
        return cls(
            np.concatenate([p.timestamps for p in parts]),
            np.concatenate([p.codes for p in parts]),
            np.concatenate([p.volts for p in parts]),
        )

    def __len__(self):
        return self.timestamps.size

    def __getitem__(self, idx) -> "SampleStream | SampleRecord":
        if isinstance(idx, slice):
            return SampleStream(self.timestamps[idx], self.codes[idx], self.volts[idx])
        return SampleRecord(float(self.timestamps[idx]), int(self.codes[idx]), float(self.volts[idx]))

    def __iter__(self) -> Iterator[SampleRecord]:
        for t, c, v in zip(self.timestamps.tolist(), self.codes.tolist(), self.volts.tolist()):
            yield SampleRecord(t, c, v)

    def chunks(self, sizes) -> Iterator["SampleStream"]:
        start = 0
        for size in sizes:
            if start >= len(self):
                break
            yield self[start : start + size]
            start += size
        if start < len(self):
            yield self[start:]


class Acquirer:
    """Incremental nearest-sample decimator + quantiser.

    Output sample k is taken from source index ``floor(k * fs_src / fs_adc + 1/2)``
    and stamped ``k / fs_adc``. State is only the running source and output
    counters, so chunk boundaries cannot change the result.
    """

    def __init__(self, source_rate: float, config: AdcConfig):
        if source_rate < config.sample_rate:
            raise ResamplingError(
                f"source rate {source_rate:g} Hz is below acquisition rate {config.sample_rate:g} Hz"
            )
        self.source_rate = float(source_rate)
        self.config = config
        self._ratio = self.source_rate / config.sample_rate
        self._n_in = 0
        self._k = 0
        self.clamp_count = 0

    def _index(self, k):
        return np.floor(np.asarray(k, dtype=float) * self._ratio + 0.5).astype(np.int64)

    def push(self, chunk) -> SampleStream:
        chunk = np.asarray(chunk, dtype=float)
        start, stop = self._n_in, self._n_in + chunk.size
        self._n_in = stop
        # upper bound on how many outputs could land in [start, stop)
        k_hi = int(math.floor((stop - 0.5) / self._ratio)) + 2
        ks = np.arange(self._k, max(self._k, k_hi))
        idx = self._index(ks)
        keep = idx < stop
        ks, idx = ks[keep], idx[keep]
        if ks.size:
            self._k = int(ks[-1]) + 1
        codes, clamped = quantize_with_flag(chunk[idx - start], self.config)
        codes = np.atleast_1d(codes)
        self.clamp_count += int(np.count_nonzero(clamped))
        ts = ks / self.config.sample_rate
        return SampleStream(ts, codes, code_to_volts(codes, self.config) if codes.size else np.empty(0))


def acquire(signal, source_rate: float, config: AdcConfig) -> SampleStream:
    """Decimate ``signal`` (sampled at ``source_rate``) and quantise it."""
    return Acquirer(source_rate, config).push(signal)

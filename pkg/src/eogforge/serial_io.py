"""Serial CSV logs as printed by the acquisition microcontroller.

Format::

    # bits=10
    # sample_rate_hz=256
    # v_ref=5.0
    0,512
    4,513
    ...

``#`` lines carry ``key=value`` metadata (written in alphabetical key
order); data rows are ``timestamp_ms,code``. Missing header keys fall back
to 256 Hz, 5.0 V, 10 bits, so bare hardware dumps parse as-is.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .adc import AdcConfig, SampleStream, code_to_volts
from .errors import CodeRangeError, SerialParseError

DEFAULT_SAMPLE_RATE = 256.0
DEFAULT_V_REF = 5.0
DEFAULT_BITS = 10

_KNOWN = {"sample_rate_hz", "v_ref", "bits", "source"}


@dataclass
class SerialLog:
    records: SampleStream
    sample_rate: float = DEFAULT_SAMPLE_RATE
    v_ref: float = DEFAULT_V_REF
    bits: int = DEFAULT_BITS
    source: str | None = None
    # any other header keys, e.g. config_hash
    extra: dict = field(default_factory=dict)
    # header keys actually present in the parsed text
    explicit_keys: frozenset = frozenset()
    empty_warning: bool = False

    @property
    def adc_config(self) -> AdcConfig:
        return AdcConfig(v_ref=self.v_ref, bits=self.bits, sample_rate=self.sample_rate)

    def __eq__(self, other):
        if not isinstance(other, SerialLog):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.v_ref == other.v_ref
            and self.bits == other.bits
            and self.source == other.source
            and self.extra == other.extra
            and np.array_equal(self.records.timestamps, other.records.timestamps)
            and np.array_equal(self.records.codes, other.records.codes)
            and np.array_equal(self.records.volts, other.records.volts)
        )


def _lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    return source


def parse_serial_csv(source) -> SerialLog:
    """Parse a log from a string or any iterable of text lines (e.g. an open file).

    Lines are consumed one at a time. Raises :class:`SerialParseError`
    (1-based ``line_no``) on malformed rows and :class:`CodeRangeError` on
    codes outside ``[0, 2**bits - 1]``. An empty data section is not an
    error; it sets ``empty_warning``.
    """
    meta: dict[str, str] = {}
    ts_ms: list[int] = []
    codes: list[int] = []
    max_code = None
    for line_no, raw in enumerate(_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                # free-form comment
                continue
            if ts_ms:
                raise SerialParseError(line_no, line, "header line after data")
            key, _, value = body.partition("=")
            meta[key.strip()] = value.strip()
            continue
        if max_code is None:
            try:
                bits = int(meta.get("bits", DEFAULT_BITS))
            except ValueError:
                raise SerialParseError(line_no, line, "bad bits header") from None
            max_code = 2**bits - 1
        parts = line.split(",")
        if len(parts) != 2:
            raise SerialParseError(line_no, line)
        try:
            t, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise SerialParseError(line_no, line) from None
        if not 0 <= c <= max_code:
            raise CodeRangeError(line_no, line, c, max_code)
        if ts_ms and t < ts_ms[-1]:
            raise SerialParseError(line_no, line, "timestamp goes backwards")
        ts_ms.append(t)
        codes.append(c)

    try:
        sample_rate = float(meta.get("sample_rate_hz", DEFAULT_SAMPLE_RATE))
        v_ref = float(meta.get("v_ref", DEFAULT_V_REF))
        bits = int(meta.get("bits", DEFAULT_BITS))
    except ValueError as exc:
        raise SerialParseError(0, str(meta), f"bad header value ({exc})") from None
    cfg = AdcConfig(v_ref=v_ref, bits=bits, sample_rate=sample_rate)
    codes_arr = np.asarray(codes, dtype=np.int64)
    stream = SampleStream(
        np.asarray(ts_ms, dtype=float) / 1000.0,
        codes_arr,
        code_to_volts(codes_arr, cfg) if codes else np.empty(0),
    )
    return SerialLog(
        records=stream,
        sample_rate=sample_rate,
        v_ref=v_ref,
        bits=bits,
        source=meta.get("source"),
        extra={k: v for k, v in meta.items() if k not in _KNOWN},
        explicit_keys=frozenset(meta),
        empty_warning=not codes,
    )


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def write_serial_csv(log: SerialLog) -> str:
    """Header (alphabetical keys) then ``timestamp_ms,code`` rows, LF endings."""
    header = {
        "bits": str(int(log.bits)),
        "sample_rate_hz": _num(log.sample_rate),
        "v_ref": repr(float(log.v_ref)),
        **{k: str(v) for k, v in log.extra.items()},
    }
    if log.source is not None:
        header["source"] = log.source
    out = [f"# {k}={header[k]}\n" for k in sorted(header)]
    ms = np.rint(log.records.timestamps * 1000.0).astype(np.int64)
    out.extend(f"{t},{c}\n" for t, c in zip(ms.tolist(), log.records.codes.tolist()))
    return "".join(out)

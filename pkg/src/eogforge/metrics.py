"""Figures of merit: SNR, mean latency and detection accuracy.

The SNR estimator is the one used on the original hardware logs,
``10*log10(mean(v**2) / var(v))``. Note that ``mean(v**2) = var(v) + mean(v)**2``,
so a DC offset inflates it; :func:`band_power_snr_db` is an alternative
(not part of the original method) that compares in-band to out-of-band power.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal as sps

from .detect import DOWN, UP, DetectionEvent
from .errors import InvalidConfigError
from .signal_model import GazeScenario

DEFAULT_MATCH_WINDOW = 0.5


@dataclass(frozen=True)
class SnrResult:
    snr_db: float
    signal_power: float
    noise_power: float
    infinite: bool = False


def snr_db(samples, ddof: int = 0) -> SnrResult:
    """Mean-square over variance, in dB.

    ``ddof=0`` (population variance) is the default; ``ddof=1`` gives the
    sample variance. A constant sequence has zero variance and reports
    ``snr_db=inf`` with ``infinite=True``.
    """
    v = np.asarray(samples, dtype=float)
    if v.size < 2:
        raise ValueError("snr_db needs at least 2 samples")
    signal_power = float(np.mean(v * v))
    if np.all(v == v[0]):
        return SnrResult(math.inf, signal_power, 0.0, infinite=True)
    noise_power = float(np.var(v, ddof=ddof))
    return SnrResult(10 * math.log10(signal_power / noise_power), signal_power, noise_power)


def band_power_snr_db(samples, sample_rate: float, band=(0.1, 10.0)) -> SnrResult:
    """Welch PSD power inside ``band`` over power outside it (DC bin excluded)."""
    v = np.asarray(samples, dtype=float)
    f, pxx = sps.welch(v, fs=sample_rate, nperseg=min(v.size, 1024))
    inside = (f >= band[0]) & (f <= band[1])
    outside = ~inside & (f > 0)
    sig = float(np.sum(pxx[inside]))
    noise = float(np.sum(pxx[outside]))
    if noise == 0:
        return SnrResult(math.inf, sig, 0.0, infinite=True)
    return SnrResult(10 * math.log10(sig / noise) if sig > 0 else -math.inf, sig, noise)


@dataclass(frozen=True)
class LatencyResult:
    mean_latency: float | None
    n_pairs: int
    misses: int
    false_positives: int
    pairs: tuple[tuple[float, float], ...] = ()


def mean_latency(stimulus_onsets, detection_onsets, window: float = DEFAULT_MATCH_WINDOW) -> LatencyResult:
    """Greedy chronological pairing, then the mean of (detection - stimulus).

    Each stimulus takes the earliest still-unmatched detection inside
    ``[onset, onset + window]``. ``mean_latency`` is None when nothing pairs.
    """
    if not window > 0:
        raise InvalidConfigError("must be > 0", "window")
    stim = [float(s) for s in stimulus_onsets]
    det = [float(d) for d in detection_onsets]
    for name, seq in (("stimulus_onsets", stim), ("detection_onsets", det)):
        if any(b < a for a, b in zip(seq, seq[1:])):
            raise ValueError(f"{name} must be time-ordered")
    pairs = []
    # detections before `lo` are either paired or precede every remaining stimulus
    lo = 0
    for s in stim:
        while lo < len(det) and det[lo] < s:
            lo += 1
        if lo < len(det) and det[lo] <= s + window:
            pairs.append((s, det[lo]))
            lo += 1
    n = len(pairs)
    mean = math.fsum(d - s for s, d in pairs) / n if n else None
    return LatencyResult(mean, n, len(stim) - n, len(det) - n, tuple(pairs))


@dataclass(frozen=True)
class AccuracyReport:
    hits: int
    misses: int
    false_positives: int
    mean_latency: float | None
    n_pairs: int
    latencies: tuple[float, ...] = ()
    per_polarity: dict = field(default_factory=dict)


def match_truth(truth, events: list[DetectionEvent], window: float = DEFAULT_MATCH_WINDOW) -> AccuracyReport:
    """Score events against ground truth given as ``[(onset, polarity), ...]``."""
    per = {}
    latencies = []
    hits = misses = fps = 0
    for pol in (UP, DOWN):
        stim = sorted(t for t, p in truth if p == pol)
        det = sorted(e.onset for e in events if e.polarity == pol)
        res = mean_latency(stim, det, window)
        per[pol] = {
            "hits": res.n_pairs,
            "misses": res.misses,
            "false_positives": res.false_positives,
            "mean_latency": res.mean_latency,
        }
        hits += res.n_pairs
        misses += res.misses
        fps += res.false_positives
        latencies.extend(d - s for s, d in res.pairs)
    mean = math.fsum(latencies) / len(latencies) if latencies else None
    return AccuracyReport(hits, misses, fps, mean, hits, tuple(latencies), per)


def scenario_truth(scenario: GazeScenario) -> list[tuple[float, str]]:
    return [(s.onset, p) for s, p in zip(scenario.saccades, scenario.polarities()) if p is not None]


def accuracy_report(
    scenario: GazeScenario, events: list[DetectionEvent], window: float = DEFAULT_MATCH_WINDOW
) -> AccuracyReport:
    """UP saccades are matched only to UP events, DOWN only to DOWN."""
    return match_truth(scenario_truth(scenario), events, window)


@dataclass
class MetricsReport:
    snr_db: float
    signal_power: float
    noise_power: float
    snr_infinite: bool = False
    snr_method: str = "mean_square_over_variance"
    n_events: int = 0
    mean_latency: float | None = None
    n_pairs: int = 0
    hits: int | None = None
    misses: int | None = None
    false_positives: int | None = None
    provenance: dict = field(default_factory=dict)

    @classmethod
    def build(cls, snr: SnrResult, events, accuracy: AccuracyReport | None = None,
              provenance=None, snr_method="mean_square_over_variance") -> "MetricsReport":
        rep = cls(
            snr_db=snr.snr_db,
            signal_power=snr.signal_power,
            noise_power=snr.noise_power,
            snr_infinite=snr.infinite,
            snr_method=snr_method,
            n_events=len(events),
            provenance=dict(provenance or {}),
        )
        if accuracy is not None:
            rep.mean_latency = accuracy.mean_latency
            rep.n_pairs = accuracy.n_pairs
            rep.hits = accuracy.hits
            rep.misses = accuracy.misses
            rep.false_positives = accuracy.false_positives
        return rep

    def to_dict(self) -> dict:
        d = asdict(self)
        # JSON has no infinity literal
        for key in ("snr_db",):
            if isinstance(d[key], float) and not math.isfinite(d[key]):
                d[key] = None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        def fmt(v):
            if v is None:
                return "n/a"
            if isinstance(v, bool):
                return "yes" if v else "no"
            if isinstance(v, float):
                return "inf" if math.isinf(v) else f"{v:.6g}"
            return str(v)

        rows = [
            ("snr_db", self.snr_db),
            ("snr_infinite", self.snr_infinite),
            ("snr_method", self.snr_method),
            ("signal_power_v2", self.signal_power),
            ("noise_power_v2", self.noise_power),
            ("events", self.n_events),
            ("hits", self.hits),
            ("misses", self.misses),
            ("false_positives", self.false_positives),
            ("n_pairs", self.n_pairs),
            ("mean_latency_s", self.mean_latency),
        ]
        rows += [(f"provenance.{k}", v) for k, v in sorted(self.provenance.items())]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {fmt(v)}" for k, v in rows) + "\n"

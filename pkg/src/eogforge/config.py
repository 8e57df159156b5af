"""ChainConfig: every resistor, cutoff, rail, seed and threshold in one record.

Configs are JSON. Each section (``crp``, ``noise``, ``afe``, ``adc``,
``detector``) overlays the chosen preset field by field; unknown keys are
rejected with their dotted path, and keys starting with ``_`` are treated as
comments. A top-level ``seed`` overrides ``noise.seed``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .adc import AdcConfig
from .afe import AfeConfig
from .detect import DetectorConfig
from .errors import InvalidConfigError
from .metrics import DEFAULT_MATCH_WINDOW
from .noise import NoiseConfig
from .signal_model import CrpModel

PRESETS = ("default", "fig6")

_SECTIONS = {
    "crp": CrpModel,
    "noise": NoiseConfig,
    "afe": AfeConfig,
    "adc": AdcConfig,
    "detector": DetectorConfig,
}


@dataclass(frozen=True)
class ChainConfig:
    crp: CrpModel = field(default_factory=CrpModel)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    afe: AfeConfig = field(default_factory=AfeConfig)
    adc: AdcConfig = field(default_factory=AdcConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    # analog simulation rate; the ADC decimates from here
    sim_rate: float = 1024.0
    match_window: float = DEFAULT_MATCH_WINDOW
    scenario: str | None = None
    preset: str = "default"

    def __post_init__(self):
        if not (math.isfinite(self.sim_rate) and self.sim_rate > 0):
            raise InvalidConfigError("must be > 0", "sim_rate")
        if self.sim_rate < self.adc.sample_rate:
            raise InvalidConfigError("must be >= adc.sample_rate", "sim_rate")
        if not self.match_window > 0:
            raise InvalidConfigError("must be > 0", "match_window")
        if self.preset not in PRESETS:
            raise InvalidConfigError(f"unknown preset, expected one of {PRESETS}", "preset")

    @property
    def seed(self) -> int:
        return self.noise.seed

    def with_seed(self, seed: int) -> "ChainConfig":
        return dataclasses.replace(self, noise=dataclasses.replace(self.noise, seed=seed))

    def to_dict(self) -> dict:
        out = {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}
        out.update(
            sim_rate=self.sim_rate,
            match_window=self.match_window,
            scenario=self.scenario,
            preset=self.preset,
            seed=self.seed,
        )
        return out

    def hash(self, scenario_dict: dict | None = None) -> str:
        """Stable digest of the canonical JSON (scenario content replaces its path)."""
        data = self.to_dict()
        data.pop("scenario")
        if scenario_dict is not None:
            data["scenario_content"] = scenario_dict
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def preset(name: str = "default") -> ChainConfig:
    """Built-in starting points.

    ``fig6`` is tuned for the 10-saccade alternation: a 1/15000
    input divider brings a 30 degree saccade down to roughly 11 mV at the
    ADC, a 0.049 V offset parks the resting level between the 0.040 V and
    0.050 V thresholds.
    """
    if name == "default":
        return ChainConfig()
    if name == "fig6":
        return ChainConfig(
            afe=AfeConfig(input_attenuation=15_000.0),
            adc=AdcConfig(input_offset=0.049),
            detector=DetectorConfig.fig6(),
            preset="fig6",
        )
    raise InvalidConfigError(f"unknown preset {name!r}, expected one of {PRESETS}", "preset")


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _coerce(value, template, path):
    """Type-check a JSON value against the default it replaces."""
    if template is None or isinstance(template, float):
        if value is None and template is None:
            return None
        if not _is_number(value):
            raise InvalidConfigError(f"expected a number, got {value!r}", path)
        return float(value)
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise InvalidConfigError(f"expected true/false, got {value!r}", path)
        return value
    if isinstance(template, int):
        if not (isinstance(value, int) and not isinstance(value, bool)):
            raise InvalidConfigError(f"expected an integer, got {value!r}", path)
        return value
    if isinstance(template, str):
        if not isinstance(value, str):
            raise InvalidConfigError(f"expected a string, got {value!r}", path)
        return value
    return value


def _overlay(obj, values: dict, section: str):
    if not isinstance(values, dict):
        raise InvalidConfigError("expected an object", section)
    fields = {f.name for f in dataclasses.fields(obj)}
    changes = {}
    for key, value in values.items():
        if key.startswith("_"):
            continue
        path = f"{section}.{key}"
        if key not in fields:
            raise InvalidConfigError("unknown field", path)
        changes[key] = _coerce(value, getattr(obj, key), path)
    try:
        return dataclasses.replace(obj, **changes)
    except InvalidConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(str(exc), section) from exc


def config_from_dict(data: dict, preset_name: str | None = None) -> ChainConfig:
    """Build a validated ChainConfig; ``preset_name`` wins over a ``preset`` key."""
    if not isinstance(data, dict):
        raise InvalidConfigError("config must be a JSON object")
    name = preset_name or data.get("preset", "default")
    if not isinstance(name, str):
        raise InvalidConfigError("expected a string", "preset")
    base = preset(name)
    kwargs = {}
    for key, value in data.items():
        if key.startswith("_") or key in ("preset", "seed"):
            continue
        if key in _SECTIONS:
            kwargs[key] = _overlay(getattr(base, key), value, key)
        elif key in ("sim_rate", "match_window"):
            kwargs[key] = _coerce(value, getattr(base, key), key)
        elif key == "scenario":
            if value is not None and not isinstance(value, str):
                raise InvalidConfigError("expected a path string", key)
            kwargs[key] = value
        else:
            raise InvalidConfigError("unknown field", key)
    cfg = dataclasses.replace(base, **kwargs)
    if "seed" in data:
        seed = data["seed"]
        if not (isinstance(seed, int) and not isinstance(seed, bool)):
            raise InvalidConfigError(f"expected an integer, got {seed!r}", "seed")
        cfg = cfg.with_seed(seed)
    return cfg


def load_config(path, preset_name: str | None = None) -> ChainConfig:
    """Read a JSON config. Relative scenario paths resolve against the config's directory."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"invalid JSON in {path}: {exc}") from exc
    cfg = config_from_dict(data, preset_name)
    if cfg.scenario is not None and not Path(cfg.scenario).is_absolute():
        cfg = dataclasses.replace(cfg, scenario=str(path.parent / cfg.scenario))
    return cfg

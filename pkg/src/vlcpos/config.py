"""Run configuration: defaults, ``key = value`` file parsing and validation.

Config files hold one ``section.key = value`` pair per line. ``#`` starts a
comment, blank lines are ignored and ``[section]`` headers may be used to
prefix the keys that follow. A JSON run manifest written by a previous run is
accepted as well, which makes every run reproducible from its output folder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .channel import ChannelParams
from .geometry import SceneGeometry

AXES = ("snr", "m", "r", "nled")
AXIS_NAMES = {
    "snr": "snr_db",
    "m": "signature_length",
    "r": "coverage_radius",
    "nled": "led_density",
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class SignalConfig:
    M: int = 200
    snr_db: float = 20.0


@dataclass(frozen=True)
class AlgorithmConfig:
    """Recovery and positioning knobs.

    ``None`` selects the geometry-derived default: ``k_max`` from the
    sparsity map, ``d_th = 2 r`` and ``residual_tol = sqrt(M) * sigma``.
    """

    k_max: int | None = None
    d_th: float | None = None
    estimator: str = "gated-prox"
    residual_tol: float | None = None
    support_threshold: float = 0.0
    kmax_resolution: float = 0.1


@dataclass(frozen=True)
class ExperimentConfig:
    axis: str = "snr"
    values: tuple[float, ...] = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
    n_ud: int = 1000
    master_seed: int = 0
    # UDs are drawn from the floor shrunk by this margin; None means the
    # coverage radius of the scene being simulated.
    edge_margin: float | None = None
    shared_uds: bool = True
    workers: int = 1


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    formats: tuple[str, ...] = ("csv", "dat")
    export_signals: bool = False


@dataclass(frozen=True)
class RunConfig:
    scene: SceneGeometry = field(default_factory=SceneGeometry)
    channel: ChannelParams = field(default_factory=ChannelParams)
    signal: SignalConfig = field(default_factory=SignalConfig)
    algorithm: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def d_th(self) -> float:
        if self.algorithm.d_th is not None:
            return self.algorithm.d_th
        return 2.0 * self.scene.coverage_radius

    @property
    def edge_margin(self) -> float:
        if self.experiment.edge_margin is not None:
            return self.experiment.edge_margin
        return self.scene.coverage_radius

    def with_axis(self, axis: str, value: float) -> "RunConfig":
        """Copy with the swept parameter set to ``value``."""
        if axis == "snr":
            return replace(self, signal=replace(self.signal, snr_db=float(value)))
        if axis == "m":
            return replace(self, signal=replace(self.signal, M=_as_int(value, "signal.M")))
        if axis == "r":
            return replace(self, scene=replace(self.scene, coverage_radius=float(value)))
        if axis == "nled":
            return replace(self, scene=replace(self.scene, n_led_per_side=_as_int(value, "scene.n_led_per_side")))
        raise ConfigError(f"experiment.axis: unknown axis {axis!r}; expected one of {AXES}")

    def to_flat(self) -> dict[str, Any]:
        """Flat ``{dotted.key: value}`` mapping, JSON serialisable."""
        out = {}
        for key, spec in KEYS.items():
            out[key] = spec.get(self)
        return out


def _as_int(value, key):
    v = float(value)
    if not v.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return int(v)


def parse_values(text) -> tuple[float, ...]:
    """``start:step:stop`` (stop inclusive) or a comma separated list."""
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("range needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        # round away accumulated binary error so 0.1-step grids print cleanly
        return tuple(float(np.round(start + i * step, 12)) for i in range(n))
    vals = tuple(float(v) for v in text.split(",") if v.strip())
    if not vals:
        raise ValueError("empty value list")
    return vals


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional(conv):
    def f(text):
        if text is None or (isinstance(text, str) and text.strip().lower() in ("", "none", "auto")):
            return None
        return conv(text)
    return f


def _int(text) -> int:
    if isinstance(text, bool):
        raise ValueError("boolean is not an integer")
    v = float(text)
    if not v.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


def _tuple_str(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(str(t) for t in text)
    return tuple(t.strip() for t in str(text).split(",") if t.strip())


def _identity(v):
    return v


@dataclass(frozen=True)
class _Key:
    section: str
    attr: str
    conv: Callable
    check: Callable[[Any], bool]
    valid: str
    to_field: Callable = _identity
    from_field: Callable = _identity

    def get(self, cfg: RunConfig):
        v = self.from_field(getattr(getattr(cfg, self.section), self.attr))
        if isinstance(v, tuple):
            v = list(v)
        if isinstance(v, (np.floating,)):
            v = float(v)
        return v


def _deg(rad):
    # 12 decimals keeps deg -> rad -> deg round trips bit-stable
    return round(float(np.rad2deg(rad)), 12)


def _pos(v):
    return v > 0


KEYS: dict[str, _Key] = {
    "scene.floor_side": _Key("scene", "floor_side", float, _pos, "> 0 (m)"),
    "scene.ceiling_height": _Key("scene", "ceiling_height", float, _pos, "> 0 (m)"),
    "scene.n_led_per_side": _Key("scene", "n_led_per_side", _int, lambda v: v >= 1, "integer >= 1"),
    "scene.coverage_radius": _Key("scene", "coverage_radius", float, _pos, "> 0 (m)"),
    "channel.detector_area": _Key("channel", "detector_area", float, _pos, "> 0 (m^2)"),
    "channel.half_power_semiangle_deg": _Key(
        "channel", "half_power_semiangle", float, lambda v: 0 < v < 90, "(0, 90) degrees",
        to_field=np.deg2rad, from_field=_deg),
    "channel.optical_filter_gain": _Key("channel", "optical_filter_gain", float, _pos, "> 0"),
    "channel.refractive_index": _Key("channel", "refractive_index", float, lambda v: v >= 1, ">= 1"),
    "channel.fov_deg": _Key(
        "channel", "fov", float, lambda v: 0 < v <= 90, "(0, 90] degrees",
        to_field=np.deg2rad, from_field=_deg),
    "signal.M": _Key("signal", "M", _int, lambda v: v >= 1, "integer >= 1"),
    "signal.snr_db": _Key("signal", "snr_db", float, lambda v: not math.isnan(v), "any real dB value (inf = noiseless)"),
    "algorithm.k_max": _Key("algorithm", "k_max", _optional(_int), lambda v: v is None or v >= 1, "integer >= 1 or auto"),
    "algorithm.d_th": _Key("algorithm", "d_th", _optional(float), lambda v: v is None or v > 0, "> 0 (m) or auto"),
    "algorithm.estimator": _Key("algorithm", "estimator", str, lambda v: v in ("gated-prox", "area-centroid"),
                                "gated-prox | area-centroid"),
    "algorithm.residual_tol": _Key("algorithm", "residual_tol", _optional(float), lambda v: v is None or v >= 0,
                                   ">= 0 or auto"),
    "algorithm.support_threshold": _Key("algorithm", "support_threshold", float, lambda v: v >= 0, ">= 0"),
    "algorithm.kmax_resolution": _Key("algorithm", "kmax_resolution", float, _pos, "> 0 (m)"),
    "experiment.axis": _Key("experiment", "axis", str, lambda v: v in AXES, " | ".join(AXES)),
    "experiment.values": _Key("experiment", "values", parse_values, lambda v: len(v) > 0,
                              "start:step:stop or comma list"),
    "experiment.n_ud": _Key("experiment", "n_ud", _int, lambda v: v >= 1, "integer >= 1"),
    "experiment.master_seed": _Key("experiment", "master_seed", _int, lambda v: v >= 0, "integer >= 0"),
    "experiment.edge_margin": _Key("experiment", "edge_margin", _optional(float), lambda v: v is None or v >= 0,
                                   ">= 0 (m) or auto"),
    "experiment.shared_uds": _Key("experiment", "shared_uds", _bool, lambda v: True, "true | false"),
    "experiment.workers": _Key("experiment", "workers", _int, lambda v: v >= 1, "integer >= 1"),
    "output.directory": _Key("output", "directory", str, lambda v: bool(v), "non-empty path"),
    "output.formats": _Key("output", "formats", _tuple_str, lambda v: set(v) <= {"csv", "dat"},
                           "comma list of csv, dat"),
    "output.export_signals": _Key("output", "export_signals", _bool, lambda v: True, "true | false"),
}


def read_config_file(path) -> dict[str, Any]:
    """Raw ``{dotted.key: value}`` pairs from a key=value file or a JSON manifest."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
        data = data.get("config", data)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return dict(data)

    out: dict[str, Any] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if section and "." not in key:
            key = f"{section}.{key}"
        out[key] = value
    return out


def build_config(raw: dict[str, Any] | None = None) -> RunConfig:
    """Validate raw dotted-key values and assemble a :class:`RunConfig`."""
    raw = dict(raw or {})
    sections: dict[str, dict[str, Any]] = {}
    for key, text in raw.items():
        spec = KEYS.get(key)
        if spec is None:
            raise ConfigError(f"unknown key {key!r}; valid keys: {', '.join(KEYS)}")
        try:
            value = spec.conv(text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: cannot parse {text!r} ({exc}); valid range: {spec.valid}") from None
        if not spec.check(value):
            raise ConfigError(f"{key}: value {value!r} out of range; valid range: {spec.valid}")
        field_value = spec.to_field(value) if value is not None else None
        if isinstance(field_value, np.floating):
            field_value = float(field_value)
        sections.setdefault(spec.section, {})[spec.attr] = field_value

    base = RunConfig()
    try:
        return RunConfig(
            scene=replace(base.scene, **sections.get("scene", {})),
            channel=replace(base.channel, **sections.get("channel", {})),
            signal=replace(base.signal, **sections.get("signal", {})),
            algorithm=replace(base.algorithm, **sections.get("algorithm", {})),
            experiment=replace(base.experiment, **sections.get("experiment", {})),
            output=replace(base.output, **sections.get("output", {})),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path=None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Defaults, then the file at ``path`` (if any), then ``overrides``."""
    raw: dict[str, Any] = {}
    if path is not None:
        raw.update(read_config_file(path))
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(raw)

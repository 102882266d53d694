"""Run configuration: defaults, a small key = value file grammar, validation.

Grammar (UTF-8 text, one statement per line)::

    # comment            ; also a comment
    epsilon = 0.02       top-level key
    hv.a = 1.95          dotted key
    [hv]                 section header, prefixes following keys with "hv."
    e = 3.56

Values are numbers, words, or comma-separated number lists.  Unknown keys
and malformed values are errors that name the line and the key.  Reports
written by the CLI embed the resolved configuration as ``#``-prefixed lines
between ``# [resolved config]`` and ``# [end config]``; such a report is
itself accepted as a config file, as is a JSON report (its ``config``
object).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

from .model import HvResponseParams

BEGIN_MARK = "# [resolved config]"
END_MARK = "# [end config]"

MODELS = ("qm", "hv", "both")
LAWS = ("ideal", "malus", "hv")
SCENARIOS = ("classical", "tensor", "free", "all")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


# key -> (attribute, parser)
_KEYS = {
    "epsilon": ("epsilon", float),
    "hv.a": ("hv_a", float),
    "hv.e": ("hv_e", float),
    "hv.c": ("hv_c", float),
    "grid.start": ("grid_start", float),
    "grid.stop": ("grid_stop", float),
    "grid.step": ("grid_step", float),
    "angles": ("angles", _floats),
    "axes": ("axes", _floats),
    "model": ("model", str),
    "law": ("law", str),
    "seed": ("seed", int),
    "mc.n_pairs": ("n_pairs", int),
    "bell.scenario": ("scenario", str),
    "bell.dim": ("dim", int),
    "bell.restarts": ("restarts", int),
    "bell.settings": ("settings", _floats),
    "tol.quad": ("tol_quad", float),
    "tol.min": ("tol_min", float),
    "output.format": ("format", str),
    "output.path": ("out", str),
}
_ATTR_TO_KEY = {attr: key for key, (attr, _) in _KEYS.items()}


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.02
    hv_a: float = 1.95
    hv_e: float = 3.56
    hv_c: float = 500.0
    grid_start: float = 0.0
    grid_stop: float = 90.0
    grid_step: float = 1.0
    angles: tuple[float, ...] = (0.0, 22.5, 45.0, 67.5, 90.0)
    axes: tuple[float, ...] = (0.0, 45.0, 90.0)
    model: str = "both"
    law: str = "hv"
    seed: int = 0
    n_pairs: int = 1_000_000
    scenario: str = "tensor"
    dim: int = 4
    restarts: int = 64
    settings: tuple[float, ...] = (0.0, 45.0, 22.5, 157.5)
    tol_quad: float = 1e-10
    tol_min: float = 1e-8
    format: str = "csv"
    out: str = "-"

    @property
    def hv_params(self) -> HvResponseParams:
        return HvResponseParams(self.hv_a, self.hv_e, self.hv_c)

    def grid(self) -> list[float]:
        n = int(math.floor((self.grid_stop - self.grid_start) / self.grid_step + 1e-9)) + 1
        return [self.grid_start + i * self.grid_step for i in range(n)]

    def items(self):
        """(key, formatted value) pairs in file grammar; floats round-trip."""
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                text = ",".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                text = repr(v)
            else:
                text = str(v)
            yield _ATTR_TO_KEY[f.name], text

    def as_dict(self) -> dict[str, object]:
        return {
            _ATTR_TO_KEY[f.name]: (list(v) if isinstance(v, tuple) else v)
            for f in dataclasses.fields(self)
            for v in [getattr(self, f.name)]
        }

    def dump(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())


def validate(cfg: RunConfig) -> RunConfig:
    def bad(attr, why):
        raise ConfigError(f"{_ATTR_TO_KEY[attr]}: {why}")

    try:
        cfg.hv_params
    except ValueError as exc:
        key = str(exc).split(" ", 1)[0]
        raise ConfigError(f"{key}: out of range ({exc})") from None
    if not 0.0 <= cfg.epsilon <= 1.0:
        bad("epsilon", f"must lie in [0, 1], got {cfg.epsilon}")
    if not cfg.grid_step > 0:
        bad("grid_step", f"must be > 0, got {cfg.grid_step}")
    if not cfg.grid_stop >= cfg.grid_start:
        bad("grid_stop", "must be >= grid.start")
    for attr in ("grid_start", "grid_stop", "grid_step", "tol_quad", "tol_min", "epsilon"):
        if not math.isfinite(getattr(cfg, attr)):
            bad(attr, "must be finite")
    for attr in ("angles", "axes"):
        if not all(math.isfinite(x) for x in getattr(cfg, attr)):
            bad(attr, "must be finite")
    if cfg.axes[0] != 0.0:
        bad("axes", "first axis is the reference and must be 0")
    if len(cfg.settings) != 4:
        bad("settings", "needs exactly four angles")
    if cfg.model not in MODELS:
        bad("model", f"must be one of {MODELS}")
    if cfg.law not in LAWS:
        bad("law", f"must be one of {LAWS}")
    if cfg.scenario not in SCENARIOS:
        bad("scenario", f"must be one of {SCENARIOS}")
    if cfg.format not in FORMATS:
        bad("format", f"must be one of {FORMATS}")
    if cfg.n_pairs < 1:
        bad("n_pairs", "must be >= 1")
    if cfg.dim not in (2, 4, 8):
        bad("dim", "must be 2, 4 or 8")
    if cfg.restarts < 1:
        bad("restarts", "must be >= 1")
    if not (cfg.tol_quad > 0 and cfg.tol_min > 0):
        bad("tol_quad" if not cfg.tol_quad > 0 else "tol_min", "must be > 0")
    return cfg


def _extract_report(text: str) -> str:
    lines = text.splitlines()
    start = lines.index(BEGIN_MARK) + 1
    end = lines.index(END_MARK, start)
    return "\n".join(line[2:] for line in lines[start:end])


def _json_report(text: str) -> str:
    try:
        config = json.loads(text)["config"]
    except (ValueError, KeyError, TypeError):
        raise ConfigError("line 1: not a JSON report with a 'config' object") from None
    lines = []
    for key, value in config.items():
        if isinstance(value, list):
            value = ",".join(repr(float(x)) for x in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines)


def parse_values(text: str) -> dict[str, object]:
    """Parse file text into {attribute: value} without applying defaults."""
    if text.lstrip().startswith("{"):
        text = _json_report(text)
    elif BEGIN_MARK in text.splitlines():
        text = _extract_report(text)
    values: dict[str, object] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        full = f"{section}.{key}" if section else key
        if full not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{full}'")
        attr, conv = _KEYS[full]
        try:
            values[attr] = conv(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for '{full}': {value!r}") from None
    return values


def parse_config(text: str, overrides: dict[str, object] | None = None) -> RunConfig:
    """Resolve file text plus overrides (attribute -> value) into a RunConfig."""
    values = parse_values(text)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate(RunConfig(**values))

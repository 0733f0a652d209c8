"""Sectioned key-value run configuration.

The format is deliberately small: `[section]` headers, `key = value`
lines, `#` comments, blank lines.  Scalars are typed by shape (int,
float, bare string) and comma-separated numbers become tuples.  Every
parse error and every rejected key carries the line number it came
from, and the canonical serialization of the parsed content is what
gets hashed into output files.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field

from .geometry import AcceleratedLine, BoostedLine, StaticLine
from .series import MCConfig, ModelParams
from .smearing import (
    Bump2D,
    BumpWindow,
    Gaussian2D,
    GaussianWindow,
    Plateau2D,
)
from .states import ThermalWindowState, VacuumState

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "parse_config_text",
    "build_worldline",
    "build_window",
    "build_cutoff",
    "build_test2d",
    "build_state",
    "build_model",
    "build_mc",
    "build_sweep",
    "config_hash",
]


class ConfigError(ValueError):
    """Malformed or invalid configuration; message carries a line number."""


_SECTION_RE = re.compile(r"^\[([a-z0-9_]+)\]$")
_KEY_RE = re.compile(r"^([A-Za-z0-9_]+)\s*=\s*(.*)$")
_INT_RE = re.compile(r"^[+-]?\d+$")

_KNOWN_SECTIONS = ("worldline", "f", "g", "state", "model", "mc", "sweep")


def _typed(raw: str):
    if "," in raw:
        parts = [p.strip() for p in raw.split(",")]
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise ValueError(f"list entries must all be numbers: {raw!r}")
    if _INT_RE.match(raw):
        return int(raw)
    try:
        return float(raw)
    except ValueError:
        return raw


@dataclass
class RunConfig:
    """Parsed sections plus the line provenance needed for messages."""

    sections: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    path: str = "<text>"

    def block(self, name: str) -> dict:
        if name not in self.sections:
            raise ConfigError(f"missing [{name}] block")
        return dict(self.sections[name])

    def line_of(self, section: str, key: str) -> int:
        return self.lines.get((section, key), 0)

    def reject_unknown(self, section: str, leftovers: dict) -> None:
        if leftovers:
            key = min(leftovers, key=lambda k: self.line_of(section, k))
            raise ConfigError(
                f"line {self.line_of(section, key)}: unknown key "
                f"{key!r} in section [{section}]")


def parse_config_text(text: str, path: str = "<text>") -> RunConfig:
    cfg = RunConfig(path=path)
    section = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1)
            if section not in _KNOWN_SECTIONS:
                raise ConfigError(f"line {ln}: unknown section [{section}]")
            if section in cfg.sections:
                raise ConfigError(f"line {ln}: duplicate section [{section}]")
            cfg.sections[section] = {}
            continue
        m = _KEY_RE.match(line)
        if not m:
            raise ConfigError(f"line {ln}: expected 'key = value' or '[section]'")
        if section is None:
            raise ConfigError(f"line {ln}: key outside any section")
        key, raw_val = m.group(1), m.group(2).strip()
        if not raw_val:
            raise ConfigError(f"line {ln}: empty value for {key!r}")
        if key in cfg.sections[section]:
            raise ConfigError(f"line {ln}: duplicate key {key!r} in [{section}]")
        try:
            cfg.sections[section][key] = _typed(raw_val)
        except ValueError as exc:
            raise ConfigError(f"line {ln}: {exc}")
        cfg.lines[(section, key)] = ln
    return cfg


def parse_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}")
    return parse_config_text(text, path=path)


def _take(cfg: RunConfig, section: str, block: dict, key: str, kind, default=None,
          required: bool = False):
    if key not in block:
        if required:
            raise ConfigError(f"missing key {key!r} in section [{section}]")
        return default
    val = block.pop(key)
    ln = cfg.line_of(section, key)
    if kind is float and isinstance(val, int):
        val = float(val)
    if kind is tuple and isinstance(val, (int, float)):
        val = (float(val),)
    if not isinstance(val, kind):
        raise ConfigError(
            f"line {ln}: {key!r} must be {kind.__name__}, got {val!r}")
    return val


def build_worldline(cfg: RunConfig):
    """Worldline object plus its proper-time domain (lo, hi, grid points)."""
    block = cfg.block("worldline")
    kind = _take(cfg, "worldline", block, "kind", str, required=True)
    lo = _take(cfg, "worldline", block, "tau_min", float, -6.0)
    hi = _take(cfg, "worldline", block, "tau_max", float, 6.0)
    grid = _take(cfg, "worldline", block, "grid", int, 13)
    if hi <= lo:
        raise ConfigError("worldline tau_max must exceed tau_min")
    if grid < 2:
        raise ConfigError("worldline grid needs at least 2 points")
    try:
        if kind == "static":
            wl = StaticLine(_take(cfg, "worldline", block, "x0", float, 0.0))
        elif kind == "boosted":
            wl = BoostedLine(_take(cfg, "worldline", block, "eta", float, 0.0))
        elif kind == "accelerated":
            wl = AcceleratedLine(
                _take(cfg, "worldline", block, "a", float, required=True))
        else:
            ln = cfg.line_of("worldline", "kind")
            raise ConfigError(f"line {ln}: unknown worldline kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(f"worldline: {exc}")
    cfg.reject_unknown("worldline", block)
    return wl, (lo, hi, grid)


def build_window(cfg: RunConfig):
    block = cfg.block("f")
    family = _take(cfg, "f", block, "family", str, required=True)
    amp = _take(cfg, "f", block, "amplitude", float, 1.0)
    try:
        if family == "gaussian":
            win = GaussianWindow(
                _take(cfg, "f", block, "sigma", float, 1.0),
                _take(cfg, "f", block, "center", float, 0.0),
                amp)
        elif family == "bump":
            win = BumpWindow(
                _take(cfg, "f", block, "lo", float, -3.0),
                _take(cfg, "f", block, "hi", float, 3.0),
                amp)
        else:
            ln = cfg.line_of("f", "family")
            raise ConfigError(f"line {ln}: unknown window family {family!r}")
    except ValueError as exc:
        raise ConfigError(f"f: {exc}")
    cfg.reject_unknown("f", block)
    return win


def build_cutoff(cfg: RunConfig, amplitude=None):
    block = cfg.block("g")
    family = _take(cfg, "g", block, "family", str, required=True)
    amp = _take(cfg, "g", block, "amplitude", float, 1e-6)
    if amplitude is not None:
        amp = float(amplitude)
    try:
        if family == "gaussian":
            g = Gaussian2D(
                _take(cfg, "g", block, "sigma0", float, 2.0),
                _take(cfg, "g", block, "sigma1", float, 2.0),
                amp)
        elif family == "bump":
            g = Bump2D(
                _take(cfg, "g", block, "t_lo", float, -1.5),
                _take(cfg, "g", block, "t_hi", float, 1.5),
                _take(cfg, "g", block, "x_lo", float, -1.5),
                _take(cfg, "g", block, "x_hi", float, 1.5),
                amp)
        elif family == "plateau":
            g = Plateau2D(
                _take(cfg, "g", block, "t_lo", float, -4.0),
                _take(cfg, "g", block, "t_hi", float, 4.0),
                _take(cfg, "g", block, "x_lo", float, -4.0),
                _take(cfg, "g", block, "x_hi", float, 4.0),
                _take(cfg, "g", block, "ramp", float, 1.0),
                amp)
        else:
            ln = cfg.line_of("g", "family")
            raise ConfigError(f"line {ln}: unknown cutoff family {family!r}")
    except ValueError as exc:
        raise ConfigError(f"g: {exc}")
    cfg.reject_unknown("g", block)
    return g


def build_test2d(cfg: RunConfig):
    """Spacetime test function for the conservation run.

    Lives in the [f] block with family bump2d; only the compact bump
    carries the three partial derivatives the divergence estimator
    moves onto it.
    """
    block = cfg.block("f")
    family = _take(cfg, "f", block, "family", str, required=True)
    if family != "bump2d":
        ln = cfg.line_of("f", "family")
        raise ConfigError(
            f"line {ln}: conservation needs an [f] block with "
            f"family = bump2d, got {family!r}")
    f2d = Bump2D(
        _take(cfg, "f", block, "t_lo", float, -1.5),
        _take(cfg, "f", block, "t_hi", float, 1.5),
        _take(cfg, "f", block, "x_lo", float, -1.5),
        _take(cfg, "f", block, "x_hi", float, 1.5),
        _take(cfg, "f", block, "amplitude", float, 1.0))
    cfg.reject_unknown("f", block)
    return f2d


def build_state(cfg: RunConfig):
    if "state" not in cfg.sections:
        return VacuumState()
    block = cfg.block("state")
    kind = _take(cfg, "state", block, "kind", str, "vacuum")
    try:
        if kind == "vacuum":
            state = VacuumState()
        elif kind == "thermal_window":
            state = ThermalWindowState(
                e_lo=_take(cfg, "state", block, "e_lo", float, 0.5),
                e_hi=_take(cfg, "state", block, "e_hi", float, 2.0),
                b=_take(cfg, "state", block, "b", float, 1.0))
        else:
            ln = cfg.line_of("state", "kind")
            raise ConfigError(f"line {ln}: unknown state kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(f"state: {exc}")
    cfg.reject_unknown("state", block)
    return state


def build_model(cfg: RunConfig, cutoff) -> ModelParams:
    block = cfg.block("model")
    beta_sq = _take(cfg, "model", block, "beta_sq", float, required=True)
    cfg.reject_unknown("model", block)
    if not beta_sq > 0.0:
        ln = cfg.line_of("model", "beta_sq")
        raise ConfigError(f"line {ln}: beta_sq must be positive")
    try:
        return ModelParams(beta=math.sqrt(beta_sq), g=cutoff)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}")


def build_mc(cfg: RunConfig, seed=None, threads: int = 1) -> MCConfig:
    block = cfg.block("mc") if "mc" in cfg.sections else {}
    samples = _take(cfg, "mc", block, "samples", int, 20_000)
    cfg_seed = _take(cfg, "mc", block, "seed", int, 2024)
    ladder = _take(cfg, "mc", block, "ladder", tuple, (1e-2, 5e-3, 2.5e-3))
    max_order = _take(cfg, "mc", block, "max_order", int, 3)
    cfg.reject_unknown("mc", block)
    try:
        return MCConfig(samples=samples,
                        seed=cfg_seed if seed is None else int(seed),
                        epsilon_ladder=tuple(ladder),
                        max_order=max_order,
                        threads=threads)
    except ValueError as exc:
        raise ConfigError(f"mc: {exc}")


_SWEEPABLE = ("rapidity", "a", "beta_sq", "g0")


def build_sweep(cfg: RunConfig):
    block = cfg.block("sweep")
    parameter = _take(cfg, "sweep", block, "parameter", str, required=True)
    values = _take(cfg, "sweep", block, "values", tuple, required=True)
    cfg.reject_unknown("sweep", block)
    if parameter not in _SWEEPABLE:
        ln = cfg.line_of("sweep", "parameter")
        raise ConfigError(
            f"line {ln}: sweep parameter must be one of {', '.join(_SWEEPABLE)}")
    if len(values) == 0:
        raise ConfigError("sweep values must be nonempty")
    return parameter, tuple(float(v) for v in values)


def config_hash(cfg: RunConfig, seed=None) -> str:
    """12-hex digest of the canonical key-value content.

    The effective seed participates (a --seed override changes the
    digest); thread count never does, because it must not change any
    result.
    """
    items = []
    for section in sorted(cfg.sections):
        for key in sorted(cfg.sections[section]):
            val = cfg.sections[section][key]
            if section == "mc" and key == "seed" and seed is not None:
                val = int(seed)
            items.append(f"{section}.{key}={val!r}")
    if seed is not None and "seed" not in cfg.sections.get("mc", {}):
        items.append(f"mc.seed={int(seed)!r}")
    blob = "\n".join(items).encode()
    return hashlib.sha256(blob).hexdigest()[:12]

"""Flat ``key = value`` run configuration shared by the CLI commands.

Example file::

    # indoor benchmark
    segments = LG:30,US:20,LG:30,DS:20,LG:30,UR:20,DR:20
    concentration = 8
    error_rate = 0.1
    seed = 7
    trials = 40
    l_w = 5
    l_v = 1

A result JSON written by the CLI can be passed wherever a config file is
accepted; its ``config`` block is used.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

from .core import EnvLabel
from .fusion import FusionConfig
from .simulator import DEFAULT_SEGMENTS, PRESETS, NoiseModel, TrialScript
from .transition import TransitionMatrix, TransitionRuleParams, build_matrix, read_matrix


def format_segments(segments) -> str:
    return ",".join(f"{EnvLabel(label).name}:{d}" for label, d in segments)


def parse_segments(text: str) -> tuple[tuple[EnvLabel, int], ...]:
    out = []
    for item in text.split(","):
        label, sep, duration = item.strip().partition(":")
        if not sep:
            raise ValueError(f"segment {item!r} is not LABEL:FRAMES")
        out.append((EnvLabel.parse(label), int(duration)))
    return tuple(out)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a simulate/fuse/eval/sweep run."""

    l_w: int = 5
    l_v: int = 1
    p_stay: float = 0.9
    p_even: float = 0.01
    p_odd: float = 0.005
    matrix_file: Optional[str] = None
    method: str = "hmm-voting"
    preset: str = "indoor"
    segments: str = format_segments(DEFAULT_SEGMENTS)
    frame_rate_hz: float = 15.0
    concentration: float = PRESETS["indoor"].concentration
    error_rate: float = PRESETS["indoor"].error_rate
    error_bias: float = PRESETS["indoor"].error_bias
    seed: int = 7
    trials: int = 5
    windows: str = "1,3,5,7,9,11"

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        """Build from string or typed values; a ``preset`` seeds the noise keys."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(values) - set(fields)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        preset = values.get("preset")
        if preset is not None:
            if preset not in PRESETS:
                raise ValueError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
            noise = PRESETS[preset]
            kwargs.update(
                concentration=noise.concentration,
                error_rate=noise.error_rate,
                error_bias=noise.error_bias,
            )
        for key, raw in values.items():
            if raw is None:
                continue
            kind = type(getattr(cls, key)) if getattr(cls, key) is not None else str
            kwargs[key] = kind(raw) if not isinstance(raw, kind) else raw
        return cls(**kwargs)

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        values = {k: v for k, v in dataclasses.asdict(self).items()}
        given = {k: v for k, v in overrides.items() if v is not None}
        if "preset" in given:
            for key in ("concentration", "error_rate", "error_bias"):
                values.pop(key)
        values.update(given)
        return RunConfig.from_mapping(values)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def matrix(self) -> TransitionMatrix:
        if self.matrix_file:
            return read_matrix(self.matrix_file)
        return build_matrix(TransitionRuleParams(self.p_stay, self.p_even, self.p_odd))

    def fusion_config(self) -> FusionConfig:
        return FusionConfig(l_w=self.l_w, l_v=self.l_v, matrix=self.matrix())

    def script(self) -> TrialScript:
        return TrialScript(parse_segments(self.segments), self.frame_rate_hz)

    def noise(self) -> NoiseModel:
        return NoiseModel(self.concentration, self.error_rate, self.error_bias, self.seed)

    def window_list(self) -> list[int]:
        return [int(tok) for tok in self.windows.replace(",", " ").split()]


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected key = value, got {line!r}")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return RunConfig.from_mapping(doc.get("config", doc))
    return RunConfig.from_mapping(parse_config_text(text))

"""Corruption specs: the 16 kinds x severities 0..5 and their parameters.

Per-severity numeric parameters live in corruption_params.cfg next to this
module (one section per kind plus one per kind/severity); they are loaded
once and treated as immutable constants for the run.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..errors import ConfigError

KINDS: tuple[str, ...] = (
    "gaussian_noise",
    "shot_noise",
    "impulse_noise",
    "speckle_noise",
    "defocus_blur",
    "glass_blur",
    "motion_blur",
    "zoom_blur",
    "snow",
    "frost",
    "fog",
    "brightness",
    "contrast",
    "elastic",
    "pixelate",
    "jpeg_compression",
)

SEVERITIES = (0, 1, 2, 3, 4, 5)
CLEAN_KEY = "clean"


def default_params_path() -> Path:
    return Path(resources.files("corrobe.corruption").joinpath("corruption_params.cfg"))  # type: ignore[arg-type]


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if "," in raw:
        return [_parse_value(p) for p in raw.split(",")]
    return raw


class ParamTable:
    """Parsed corruption parameter configuration."""

    def __init__(self, kind_settings: dict[str, dict], severity_params: dict[tuple[str, int], dict], path: str):
        self.kind_settings = kind_settings
        self.severity_params = severity_params
        self.path = path

    def params_for(self, kind: str, severity: int) -> dict:
        if kind not in KINDS:
            raise ConfigError(f"unknown corruption kind {kind!r}")
        if severity == 0:
            return {}
        try:
            return self.severity_params[(kind, severity)]
        except KeyError:
            raise ConfigError(
                f"no parameters for ({kind}, severity {severity}) in {self.path}"
            ) from None

    def is_stochastic(self, kind: str) -> bool:
        if kind not in KINDS:
            raise ConfigError(f"unknown corruption kind {kind!r}")
        return bool(self.kind_settings.get(kind, {}).get("stochastic", False))

    def kind_setting(self, kind: str, name: str, default=None):
        return self.kind_settings.get(kind, {}).get(name, default)


@lru_cache(maxsize=4)
def load_params(path: str | None = None) -> ParamTable:
    src = Path(path) if path else default_params_path()
    if not src.exists():
        raise ConfigError(f"corruption parameter file not found: {src}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read(src)
    kind_settings: dict[str, dict] = {}
    severity_params: dict[tuple[str, int], dict] = {}
    for section in parser.sections():
        values = {k: _parse_value(v) for k, v in parser[section].items()}
        if "." in section:
            kind, _, sev = section.partition(".")
            if kind not in KINDS:
                raise ConfigError(f"unknown kind {kind!r} in section [{section}] of {src}")
            try:
                severity = int(sev)
            except ValueError:
                raise ConfigError(f"bad severity in section [{section}] of {src}") from None
            if not 1 <= severity <= 5:
                raise ConfigError(f"severity out of range in section [{section}] of {src}")
            severity_params[(kind, severity)] = values
        else:
            if section not in KINDS:
                raise ConfigError(f"unknown kind section [{section}] in {src}")
            kind_settings[section] = values
    missing = [(k, s) for k in KINDS for s in range(1, 6) if (k, s) not in severity_params]
    if missing:
        raise ConfigError(f"parameter file {src} missing sections for {missing[:4]}...")
    return ParamTable(kind_settings, severity_params, str(src))


@dataclass(frozen=True, eq=False)
class CorruptionSpec:
    """One corruption kind at one severity, with its frozen parameters.

    Severity 0 is the identity transform for every kind, so all severity-0
    specs share the key "clean" and compare equal to each other.
    """

    kind: str
    severity: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown corruption kind {self.kind!r}")
        if self.severity not in SEVERITIES:
            raise ConfigError(f"severity must be 0..5, got {self.severity}")

    @property
    def key(self) -> str:
        """Canonical key; severity 0 collapses to "clean" for every kind."""
        if self.severity == 0:
            return CLEAN_KEY
        return f"{self.kind}_{self.severity}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CorruptionSpec):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @classmethod
    def from_key(cls, key: str, params: ParamTable | None = None) -> "CorruptionSpec":
        if params is None:
            params = load_params()
        if key == CLEAN_KEY:
            return cls(kind=KINDS[0], severity=0)
        kind, _, sev = key.rpartition("_")
        if kind not in KINDS:
            raise ConfigError(f"cannot parse corruption key {key!r}")
        try:
            severity = int(sev)
        except ValueError:
            raise ConfigError(f"cannot parse corruption key {key!r}") from None
        if not 1 <= severity <= 5:
            raise ConfigError(f"severity out of range in key {key!r}")
        return cls(kind=kind, severity=severity, params=params.params_for(kind, severity))


def enumerate_corruptions(params: ParamTable | None = None) -> list[CorruptionSpec]:
    """All 81 specs: "clean" first, then the 16 kinds x severities 1..5 in
    taxonomy order (noise, blur, weather, digital), severity-minor."""
    if params is None:
        params = load_params()
    specs = [CorruptionSpec(kind=KINDS[0], severity=0)]
    for kind in KINDS:
        for severity in range(1, 6):
            specs.append(CorruptionSpec(kind=kind, severity=severity, params=params.params_for(kind, severity)))
    return specs

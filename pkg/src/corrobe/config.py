"""Pipeline configuration and its content hash.

The hash covers everything that changes computed results: the corruption
parameter file, the vocabulary and lexicon files, the judgment threshold,
the distance weight alpha, clustering parameters, and the tokenizer version.
Cached stage outputs are addressed by this hash, so any config change
invalidates them automatically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corruption.specs import default_params_path
from .errors import ConfigError
from .judgment import DEFAULT_THRESHOLD
from .metrics.tokenizer import TOKENIZER_VERSION
from .patterns.clustering import DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_MIN_SAMPLES
from .patterns.distance import DEFAULT_ALPHA
from .sg.model import _data_path

SG_SOURCES = ("template", "files")


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = DEFAULT_ALPHA
    judgment_threshold: float = DEFAULT_THRESHOLD
    missing_probe_policy: str = "keep-fp"
    min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE
    min_samples: int = DEFAULT_MIN_SAMPLES
    sg_source: str = "template"
    corruption_params_path: str = field(default_factory=lambda: str(default_params_path()))
    synonyms_path: str = field(default_factory=lambda: str(_data_path("synonyms.txt")))
    colors_path: str = field(default_factory=lambda: str(_data_path("colors.txt")))
    sizes_path: str = field(default_factory=lambda: str(_data_path("sizes.txt")))

    def __post_init__(self):
        if self.sg_source not in SG_SOURCES:
            raise ConfigError(f"sg_source must be one of {SG_SOURCES}, got {self.sg_source!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")

    def with_overrides(self, **kwargs) -> "PipelineConfig":
        return replace(self, **kwargs)

    def config_hash(self) -> str:
        h = hashlib.sha256()
        payload = {
            "alpha": self.alpha,
            "judgment_threshold": self.judgment_threshold,
            "missing_probe_policy": self.missing_probe_policy,
            "min_cluster_size": self.min_cluster_size,
            "min_samples": self.min_samples,
            "sg_source": self.sg_source,
            "tokenizer_version": TOKENIZER_VERSION,
        }
        h.update(json.dumps(payload, sort_keys=True).encode())
        for path in (self.corruption_params_path, self.synonyms_path, self.colors_path, self.sizes_path):
            p = Path(path)
            if not p.exists():
                raise ConfigError(f"config references missing file: {p}")
            h.update(p.read_bytes())
        return h.hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "judgment_threshold": self.judgment_threshold,
            "missing_probe_policy": self.missing_probe_policy,
            "min_cluster_size": self.min_cluster_size,
            "min_samples": self.min_samples,
            "sg_source": self.sg_source,
            "corruption_params_path": self.corruption_params_path,
            "synonyms_path": self.synonyms_path,
            "colors_path": self.colors_path,
            "sizes_path": self.sizes_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}  # noqa: C416
        return cls(**{k: v for k, v in data.items() if k in known})

from .batch import CorruptionRunReport, corrupt_dataset, output_path
from .engine import RgbImage, corrupt, psnr, rng_for
from .specs import (
    CLEAN_KEY,
    KINDS,
    CorruptionSpec,
    ParamTable,
    default_params_path,
    enumerate_corruptions,
    load_params,
)

__all__ = [
    "CLEAN_KEY",
    "CorruptionRunReport",
    "CorruptionSpec",
    "KINDS",
    "ParamTable",
    "RgbImage",
    "corrupt",
    "corrupt_dataset",
    "default_params_path",
    "enumerate_corruptions",
    "load_params",
    "output_path",
    "psnr",
    "rng_for",
]

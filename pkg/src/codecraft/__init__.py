"""Planar bivariate-bicycle codes and logical measurements by code surgery."""

from .bb import (
    CodeError,
    CssCode,
    LogicalBasis,
    PlanarBBSpec,
    build_planar_bb,
    canonical_logicals,
    load_config,
)
from .craft import DeformedCode, x_pipeline, z_pipeline_by_duality, two_block_pipeline
from .distance import css_distance, dressed_distance
from .paint import PaintConfig, PaintFailure, constrained_kernel_basis, paint
from .basis import optimize_basis
from .report import build_measurement, run_measurement

__version__ = "0.1.0"

__all__ = [
    "CodeError",
    "CssCode",
    "LogicalBasis",
    "PlanarBBSpec",
    "DeformedCode",
    "build_planar_bb",
    "canonical_logicals",
    "load_config",
    "x_pipeline",
    "z_pipeline_by_duality",
    "two_block_pipeline",
    "css_distance",
    "dressed_distance",
    "PaintConfig",
    "PaintFailure",
    "constrained_kernel_basis",
    "paint",
    "optimize_basis",
    "build_measurement",
    "run_measurement",
]

"""Fencing footwork classification from 2D pose sequences.

Temporal convolutional classifiers over skeleton windows, a hand-rolled
tensor/autodiff core, preprocessing and sampling pipeline, training loop,
and person-independent cross-validation harness, fronted by a CLI and a
FastAPI service.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, FenceNetError, NumericError, ShapeError

__all__ = ["ConfigError", "DataError", "FenceNetError", "NumericError", "ShapeError",
           "__version__"]

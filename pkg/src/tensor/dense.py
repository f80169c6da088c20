from __future__ import annotations

import numpy as np

from ..errors import DimensionError, NumericError


DTYPE = np.float64


def as_dense(values):
	"""Return `values` as a row-major 2-D float64 array.

	Scalars become 1×1 and 1-D inputs become a single row, so every value
	flowing through a tape has a (rows, cols) shape.
	"""
	array = np.asarray(values, dtype=DTYPE)
	if array.ndim == 0:
		return array.reshape(1, 1)
	if array.ndim == 1:
		return array.reshape(1, -1)
	if array.ndim != 2:
		raise DimensionError(f"dense values must be at most 2-D, got shape {array.shape}")
	return array


def zeros(rows, cols):
	return np.zeros((rows, cols), dtype=DTYPE)


def require_same_shape(a, b, op):
	if a.shape != b.shape:
		raise DimensionError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def require_row(b, op):
	if b.shape[0] != 1:
		raise DimensionError(f"{op}: expected a single row, got shape {b.shape}")


def require_finite(array, what):
	if not np.all(np.isfinite(array)):
		raise NumericError(f"non-finite value in {what}")

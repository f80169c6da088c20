from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tape import Tape
from ..errors import NumericError


@dataclass
class GradCheckReport:
	max_rel_error: float
	n_checked: int
	worst_entry: tuple | None
	tol: float

	@property
	def passed(self):
		return self.max_rel_error < self.tol


def _evaluate(build):
	tape = Tape()
	value = build(tape).item()
	if not np.isfinite(value):
		raise NumericError(f"grad_check: forward value is {value}")
	return value


def grad_check(build, params, step=1e-4, tol=1e-4, atol=1e-8, max_entries=None, rng=None):
	"""Compare tape gradients with central finite differences.

	Parameters
	----------
	build : callable
		`build(tape) -> Node` building a deterministic 1×1 output from the
		arrays in `params` (read at call time, so in-place perturbation is
		seen).

	params : dict[str, numpy.ndarray]
		Trainable arrays by the name they are registered under on the tape
		(parameter name or embedding table name). Perturbed in place and
		restored.

	step : float, default=1e-4
		Finite-difference step h.

	tol : float, default=1e-4
		The check passes iff the max relative error is below `tol`.

	atol : float, default=1e-8
		Floor of the relative-error denominator, so entries whose true
		gradient is ~0 are compared absolutely.

	max_entries : int or None, default=None
		If set, check at most this many randomly chosen entries per array.

	Returns
	-------
	report : GradCheckReport
	"""
	if step <= 0:
		raise ValueError(f"step must be positive, got {step}")

	tape = Tape()
	output = build(tape)
	if not np.isfinite(output.item()):
		raise NumericError(f"grad_check: forward value is {output.item()}")
	gradients = tape.backward(output)

	max_rel_error = 0.0
	worst_entry = None
	n_checked = 0
	for name, array in params.items():
		analytic = gradients.dense_for(name, array.shape)
		indices = list(np.ndindex(array.shape))
		if max_entries is not None and len(indices) > max_entries:
			rng = rng if rng is not None else np.random.default_rng(0)
			chosen = rng.choice(len(indices), size=max_entries, replace=False)
			indices = [indices[i] for i in sorted(chosen)]

		for index in indices:
			original = array[index]
			array[index] = original + step
			f_plus = _evaluate(build)
			array[index] = original - step
			f_minus = _evaluate(build)
			array[index] = original

			numeric = (f_plus - f_minus) / (2 * step)
			exact = analytic[index]
			rel_error = abs(exact - numeric) / max(abs(exact), abs(numeric), atol)
			n_checked += 1
			if rel_error > max_rel_error or worst_entry is None:
				max_rel_error = max(max_rel_error, rel_error)
				worst_entry = (name, index, float(exact), float(numeric))

	return GradCheckReport(max_rel_error, n_checked, worst_entry, tol)

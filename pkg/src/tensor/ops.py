"""Primitive ops with hand-derived backward rules.

Every op takes tape nodes, records one node, and returns it. Shapes are
(rows, cols); "row vector" means 1×d.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import expit, softmax

from .dense import require_finite, require_row, require_same_shape
from ..errors import DimensionError, EmptySequenceError


def add(a, b):
	require_same_shape(a.value, b.value, "add")

	def backward(grad):
		return grad, grad

	return a.tape.record(a.value + b.value, (a, b), backward)


def add_broadcast(a, b):
	"""out[i][j] = a[i][j] + b[0][j] for a H×d and b 1×d."""
	require_row(b.value, "add_broadcast")
	if a.shape[1] != b.shape[1]:
		raise DimensionError(f"add_broadcast: column mismatch {a.shape} vs {b.shape}")

	def backward(grad):
		return grad, grad.sum(axis=0, keepdims=True)

	return a.tape.record(a.value + b.value, (a, b), backward)


def hadamard(a, b):
	require_same_shape(a.value, b.value, "hadamard")
	a_value, b_value = a.value, b.value

	def backward(grad):
		return grad * b_value, grad * a_value

	return a.tape.record(a_value * b_value, (a, b), backward)


def broadcast_rows(b, rows):
	"""Repeat a 1×d row `rows` times."""
	require_row(b.value, "broadcast_rows")

	def backward(grad):
		return (grad.sum(axis=0, keepdims=True),)

	return b.tape.record(np.repeat(b.value, rows, axis=0), (b,), backward)


def concat_cols(*nodes):
	rows = {node.shape[0] for node in nodes}
	if len(rows) != 1:
		raise DimensionError(f"concat_cols: row counts differ {[node.shape for node in nodes]}")
	widths = [node.shape[1] for node in nodes]
	splits = np.cumsum(widths)[:-1]

	def backward(grad):
		return tuple(np.split(grad, splits, axis=1))

	return nodes[0].tape.record(np.concatenate([node.value for node in nodes], axis=1), nodes, backward)


def scaled_dot_logits(keys, query, scale):
	"""Plain-array helper: z_i = <query, keys_i> * scale as a 1×H row."""
	return (keys @ query.T).T * scale


def scaled_dot_softmax(keys, query, scale):
	"""Softmax over z_i = <query, keys_i> * scale, returned as 1×H.

	The softmax subtracts max(z) before exponentiating.
	"""
	if keys.shape[0] == 0:
		raise EmptySequenceError("scaled_dot_softmax over an empty sequence")
	require_row(query.value, "scaled_dot_softmax")
	if keys.shape[1] != query.shape[1]:
		raise DimensionError(f"scaled_dot_softmax: key/query width {keys.shape} vs {query.shape}")

	keys_value, query_value = keys.value, query.value
	weights = softmax(scaled_dot_logits(keys_value, query_value, scale), axis=1)

	def backward(grad):
		# d softmax: s * (g - <g, s>)
		grad_logits = weights * (grad - np.sum(grad * weights))
		grad_keys = grad_logits.T @ query_value * scale
		grad_query = grad_logits @ keys_value * scale
		return grad_keys, grad_query

	return keys.tape.record(weights, (keys, query), backward)


def weighted_sum(weights, values):
	"""1×H weights times H×d values -> 1×d."""
	require_row(weights.value, "weighted_sum")
	if weights.shape[1] != values.shape[0]:
		raise DimensionError(f"weighted_sum: {weights.shape} weights for {values.shape} values")
	weights_value, values_value = weights.value, values.value

	def backward(grad):
		return grad @ values_value.T, weights_value.T @ grad

	return weights.tape.record(weights_value @ values_value, (weights, values), backward)


def mean_rows(values):
	"""Unweighted mean of the H rows, i.e. fixed weights 1/H."""
	n_rows = values.shape[0]
	if n_rows == 0:
		raise EmptySequenceError("mean over an empty sequence")

	def backward(grad):
		return (np.repeat(grad / n_rows, n_rows, axis=0),)

	return values.tape.record(values.value.mean(axis=0, keepdims=True), (values,), backward)


def linear(x, weight, bias):
	if x.shape[1] != weight.shape[0] or bias.shape != (1, weight.shape[1]):
		raise DimensionError(f"linear: {x.shape} @ {weight.shape} + {bias.shape}")
	x_value, weight_value = x.value, weight.value

	def backward(grad):
		return grad @ weight_value.T, x_value.T @ grad, grad

	return x.tape.record(x_value @ weight_value + bias.value, (x, weight, bias), backward)


def relu(x):
	mask = x.value > 0

	def backward(grad):
		return (grad * mask,)

	return x.tape.record(x.value * mask, (x,), backward)


def sum_all(a):
	shape = a.shape

	def backward(grad):
		return (np.full(shape, grad[0, 0]),)

	return a.tape.record(np.array([[a.value.sum()]]), (a,), backward)


def mlp_forward(x, layers):
	"""ReLU MLP ending in a linear 1-unit layer (the logit).

	Parameters
	----------
	x : Node
		1×n input row.

	layers : list of (Node, Node)
		(weight n_in×n_out, bias 1×n_out) pairs; the last must have n_out == 1.
	"""
	if not layers:
		raise DimensionError("mlp_forward needs at least one layer")
	if layers[-1][0].shape[1] != 1:
		raise DimensionError(f"mlp_forward: last layer must output 1 unit, got {layers[-1][0].shape}")

	hidden = x
	for weight, bias in layers[:-1]:
		hidden = relu(linear(hidden, weight, bias))
	weight, bias = layers[-1]
	return linear(hidden, weight, bias)


def sigmoid_xent(logit, label):
	"""Binary cross-entropy on a logit in the overflow-free form.

	loss = log(1 + e^z) - y*z, grad = sigmoid(z) - y.

	Returns
	-------
	loss, grad_logit : float, float
	"""
	if label not in (0, 1):
		raise ValueError(f"label must be 0 or 1, got {label!r}")
	loss = float(np.logaddexp(0.0, logit) - label * logit)
	return loss, float(expit(logit) - label)


def xent(logit, label):
	"""Tape version of `sigmoid_xent` on a 1×1 logit node."""
	loss, grad_logit = sigmoid_xent(logit.item(), label)
	require_finite(np.array([loss]), "cross-entropy loss")

	def backward(grad):
		return (grad * grad_logit,)

	return logit.tape.record(np.array([[loss]]), (logit,), backward)


def inverse_sqrt(d):
	return 1.0 / math.sqrt(d)

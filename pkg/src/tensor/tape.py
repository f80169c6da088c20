from __future__ import annotations

import numpy as np

from .dense import as_dense, zeros
from ..errors import DimensionError


class Node:
	"""One value on a tape.

	`inputs` and `backward_fn` are empty for leaves and constants;
	`backward_fn(grad_out)` returns one gradient (or None) per input.
	"""
	__slots__ = ("tape", "value", "grad", "inputs", "backward_fn")

	def __init__(self, tape, value, inputs=(), backward_fn=None):
		self.tape = tape
		self.value = value
		self.grad = None
		self.inputs = inputs
		self.backward_fn = backward_fn


	@property
	def shape(self):
		return self.value.shape


	def item(self):
		return float(self.value[0, 0])


class Gradients:
	"""Gradients harvested from one or more tapes.

	`dense` maps parameter names to full arrays; `rows` maps embedding table
	names to {row id: gradient row} so untouched rows cost nothing.
	"""
	def __init__(self):
		self.dense = {}
		self.rows = {}


	def add_dense(self, name, grad):
		if name in self.dense:
			self.dense[name] = self.dense[name] + grad
		else:
			self.dense[name] = np.array(grad, dtype=np.float64)


	def add_row(self, table_name, row, grad):
		table_rows = self.rows.setdefault(table_name, {})
		if row in table_rows:
			table_rows[row] = table_rows[row] + grad
		else:
			table_rows[row] = np.array(grad, dtype=np.float64)


	def merge(self, other):
		for name, grad in other.dense.items():
			self.add_dense(name, grad)
		for table_name, table_rows in other.rows.items():
			for row, grad in table_rows.items():
				self.add_row(table_name, row, grad)
		return self


	def scale(self, factor):
		for name in self.dense:
			self.dense[name] = self.dense[name] * factor
		for table_rows in self.rows.values():
			for row in table_rows:
				table_rows[row] = table_rows[row] * factor
		return self


	def dense_for(self, name, shape):
		"""Return the gradient of `name` as a full array of `shape` (zeros if unused)."""
		if name in self.dense:
			return self.dense[name]
		full = np.zeros(shape, dtype=np.float64)
		for row, grad in self.rows.get(name, {}).items():
			full[row] += grad
		return full


class Tape:
	"""Ordered record of executed primitive ops for one forward pass.

	Build a graph with `parameter`, `lookup`, `constant` and the functions in
	`src.tensor.ops`, then call `backward` on a 1×1 output. A tape is
	single-use and not thread-safe; run one tape per sample.
	"""
	def __init__(self):
		self.nodes = []
		self._parameters = []
		self._lookups = []


	def record(self, value, inputs, backward_fn):
		node = Node(self, value, tuple(inputs), backward_fn)
		self.nodes.append(node)
		return node


	def constant(self, values):
		return self.record(as_dense(values), (), None)


	def parameter(self, array, name):
		node = self.record(as_dense(array), (), None)
		self._parameters.append((name, node))
		return node


	def lookup(self, table, ids):
		ids = np.asarray(ids, dtype=np.int64).reshape(-1)
		node = self.record(table.gather(ids), (), None)
		self._lookups.append((table.name, ids, node))
		return node


	def backward(self, output):
		"""Run every recorded backward rule in reverse order.

		Returns
		-------
		gradients : Gradients
			Gradients of `output` w.r.t. every parameter and looked-up table
			row registered on this tape. Leaves the output does not depend on
			receive exactly zero.
		"""
		if output.shape != (1, 1):
			raise DimensionError(f"backward needs a 1×1 output, got {output.shape}")

		output.grad = np.ones((1, 1))
		for node in reversed(self.nodes):
			if node.grad is None or node.backward_fn is None:
				continue
			input_grads = node.backward_fn(node.grad)
			for input_node, grad in zip(node.inputs, input_grads):
				if grad is None:
					continue
				input_node.grad = grad if input_node.grad is None else input_node.grad + grad

		gradients = Gradients()
		for name, node in self._parameters:
			grad = node.grad if node.grad is not None else zeros(*node.shape)
			gradients.add_dense(name, grad)
		for table_name, ids, node in self._lookups:
			if node.grad is None:
				continue
			for position, row in enumerate(ids):
				gradients.add_row(table_name, int(row), node.grad[position])
		return gradients

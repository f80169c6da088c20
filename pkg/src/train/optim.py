from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


OPTIMIZERS = ("adam", "adagrad")


def adam_step(param, grad, m, v, t, learning_rate, beta1=0.9, beta2=0.999, epsilon=1e-8):
	"""One bias-corrected Adam update at timestep `t` (1-based).

	Returns
	-------
	param, m, v : np.ndarray
		New arrays; the inputs are not modified.
	"""
	m = beta1 * m + (1.0 - beta1) * grad
	v = beta2 * v + (1.0 - beta2) * grad * grad
	m_hat = m / (1.0 - beta1 ** t)
	v_hat = v / (1.0 - beta2 ** t)
	return param - learning_rate * m_hat / (np.sqrt(v_hat) + epsilon), m, v


def adagrad_step(param, grad, accumulator, learning_rate, epsilon=1e-8):
	accumulator = accumulator + grad * grad
	return param - learning_rate * grad / (np.sqrt(accumulator) + epsilon), accumulator


@dataclass
class OptimizerState:
	"""Per-parameter optimizer slots plus the shared timestep.

	Embedding tables are updated lazily: only rows present in a batch's
	gradients have their weights and slots touched; `t` is global and
	increments once per applied batch.
	"""
	kind: str = "adam"
	learning_rate: float = 1e-3
	beta1: float = 0.9
	beta2: float = 0.999
	epsilon: float = 1e-8
	t: int = 0
	first: dict = field(default_factory=dict)
	second: dict = field(default_factory=dict)

	def __post_init__(self):
		if self.kind not in OPTIMIZERS:
			raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.kind!r}")


	@classmethod
	def from_config(cls, config):
		return cls(config.optimizer, config.learning_rate, config.beta1, config.beta2, config.epsilon)


	def _slots(self, name, shape):
		if name not in self.second:
			self.first[name] = np.zeros(shape)
			self.second[name] = np.zeros(shape)
		return self.first[name], self.second[name]


	def _update(self, param, grad, m, v):
		if self.kind == "adam":
			return adam_step(param, grad, m, v, self.t, self.learning_rate, self.beta1, self.beta2, self.epsilon)
		param, v = adagrad_step(param, grad, v, self.learning_rate, self.epsilon)
		return param, m, v


	def apply(self, model, gradients):
		"""Apply one batch of (already averaged) gradients to `model` in place."""
		self.t += 1
		for name, grad in gradients.dense.items():
			param = model.params[name]
			m, v = self._slots(name, param.shape)
			param[...], m[...], v[...] = self._update(param, grad, m, v)

		for name in sorted(gradients.rows):
			table_rows = gradients.rows[name]
			table = model.tables[name]
			m, v = self._slots(name, table.weights.shape)
			rows = np.array(sorted(table_rows), dtype=np.int64)
			grad = np.stack([table_rows[row] for row in rows])
			table.weights[rows], m[rows], v[rows] = self._update(table.weights[rows], grad, m[rows], v[rows])

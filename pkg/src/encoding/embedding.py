from __future__ import annotations

import numpy as np

from ..errors import IdLookupError
from ..tensor import ops


INIT_SCALE = 0.01


class EmbeddingTable:
	"""Dense id -> vector map.

	Optimizer moments for the table live in the optimizer state under
	`name`, one row per id, and are touched only for looked-up rows.
	"""
	def __init__(self, name, n_ids, dim, rng=None, weights=None):
		self.name = name
		self.n_ids = n_ids
		self.dim = dim
		if weights is not None:
			weights = np.asarray(weights, dtype=np.float64)
			if weights.shape != (n_ids, dim):
				raise ValueError(f"{name}: weights shape {weights.shape} != {(n_ids, dim)}")
			self.weights = weights
		else:
			rng = rng if rng is not None else np.random.default_rng(0)
			self.weights = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(n_ids, dim))


	def gather(self, ids):
		ids = np.asarray(ids, dtype=np.int64)
		if ids.size and (ids.min() < 0 or ids.max() >= self.n_ids):
			bad = ids[(ids < 0) | (ids >= self.n_ids)][0]
			raise IdLookupError(f"{self.name}: id {bad} outside [0, {self.n_ids})")
		return self.weights[ids]


	def __repr__(self):
		return f"EmbeddingTable({self.name!r}, n_ids={self.n_ids}, dim={self.dim})"


def semantic_embed(tape, category_table, item_table, interactions):
	"""e_i = [c(X_i), it(X_i)] for each interaction, stacked as rows (H×d)."""
	category_ids = [interaction.category_id for interaction in interactions]
	item_ids = [interaction.item_id for interaction in interactions]
	return ops.concat_cols(tape.lookup(category_table, category_ids), tape.lookup(item_table, item_ids))


def semantic_vector(interaction, category_table, item_table):
	"""Tape-free 1×d semantic embedding of one interaction."""
	return np.concatenate([
		category_table.gather([interaction.category_id]),
		item_table.gather([interaction.item_id]),
	], axis=1)

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .spec import LEARNED_CTC_VARIANTS, ModelSpec, Variant
from ..encoding import EmbeddingTable, EncoderKind, TemporalEncoder, encode_behavior, semantic_embed
from ..errors import EmptySequenceError, InvalidSpecError, UnsupportedVariantError
from ..tensor import Tape, ops


logger = logging.getLogger(__name__)


@dataclass
class TimOutput:
	"""Result of the interest module on one sample.

	`logits` holds the scaled attention logits z_i (None with TA off) and
	`representations` the per-behavior value rows that were pooled.
	"""
	u: object
	alpha: object
	behaviors: object
	target: object
	logits: np.ndarray | None
	representations: np.ndarray

	@property
	def representation_norms(self):
		return np.linalg.norm(self.representations, axis=1)


@dataclass
class LearnedTerms:
	"""Per-behavior learned correlation terms, in history order (oldest first)."""
	logits: np.ndarray | None
	attention: np.ndarray
	representation: np.ndarray

	@property
	def correlation(self):
		return self.attention * self.representation

	@property
	def positions(self):
		"""Target-relative position of each entry (1 = most recent)."""
		return np.arange(len(self.attention), 0, -1)


def glorot_uniform(rng, fan_in, fan_out):
	limit = math.sqrt(6.0 / (fan_in + fan_out))
	return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class TinModel:
	"""One member of the temporal-interest model family.

	Parameters
	----------
	spec : ModelSpec
		Variant, encoder kind and dimensions.

	n_categories, n_items : int
		Vocabulary sizes of the category and item tables.

	encoder : TemporalEncoder, default=None
		Required (and fitted) when the variant has TI; ignored otherwise.

	seed : int, default=0
		Seeds every initial weight.

	Attributes
	----------
	tables : dict[str, EmbeddingTable]
		Embedding tables by name; sparse gradients are keyed by these names.

	params : dict[str, np.ndarray]
		Dense MLP parameters `mlp.<k>.weight` / `mlp.<k>.bias`.
	"""
	def __init__(self, spec, n_categories, n_items, encoder=None, seed=0, initialize=True):
		self.spec = spec
		self.n_categories = n_categories
		self.n_items = n_items
		if spec.variant.ti:
			if encoder is None or encoder.kind is not spec.encoder:
				raise InvalidSpecError(f"{spec.variant.tag} needs a fitted {spec.encoder.value} encoder")
			self.encoder = encoder
		else:
			self.encoder = TemporalEncoder(EncoderKind.NONE)

		self.tables = {}
		self.params = {}
		if initialize:
			self._initialize(np.random.default_rng(seed))


	def layout(self):
		"""(kind, name, shape) of every table and MLP parameter, in creation order."""
		spec = self.spec
		if spec.variant is Variant.DIN_SPLIT:
			if spec.d_ta > 0:
				yield "table", "category_ta", (self.n_categories, spec.d_ta)
				yield "table", "item_ta", (self.n_items, spec.d_ta)
			yield "table", "category_tr", (self.n_categories, spec.d_tr)
			yield "table", "item_tr", (self.n_items, spec.d_tr)
		else:
			yield "table", "category", (self.n_categories, spec.d_cat)
			yield "table", "item", (self.n_items, spec.d_item)
			if spec.variant.ti:
				yield "table", "temporal", (self.encoder.n_buckets, spec.embedding_dim)

		dims = (spec.head_input_dim, *spec.mlp_dims, 1)
		for k, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
			yield "param", f"mlp.{k}.weight", (fan_in, fan_out)
			yield "param", f"mlp.{k}.bias", (1, fan_out)


	def _initialize(self, rng):
		for kind, name, (n_rows, n_cols) in self.layout():
			if kind == "table":
				self._add_table(name, n_rows, n_cols, rng)
			elif name.endswith(".weight"):
				self.params[name] = glorot_uniform(rng, n_rows, n_cols)
			else:
				self.params[name] = np.zeros((n_rows, n_cols))


	def _add_table(self, name, n_ids, dim, rng=None, weights=None):
		self.tables[name] = EmbeddingTable(name, n_ids, dim, rng=rng, weights=weights)


	@property
	def n_layers(self):
		return len(self.spec.mlp_dims) + 1


	def parameter_shapes(self):
		shapes = {name: table.weights.shape for name, table in self.tables.items()}
		shapes.update({name: array.shape for name, array in self.params.items()})
		return shapes


	def _mlp_layers(self, tape):
		return [
			(tape.parameter(self.params[f"mlp.{k}.weight"], f"mlp.{k}.weight"),
			 tape.parameter(self.params[f"mlp.{k}.bias"], f"mlp.{k}.bias"))
			for k in range(self.n_layers)
		]


	def _embed(self, tape, sample, category_name="category", item_name="item"):
		category, item = self.tables[category_name], self.tables[item_name]
		behaviors = semantic_embed(tape, category, item, sample.history)
		target = semantic_embed(tape, category, item, (sample.target,))
		if self.spec.variant.ti:
			temporal = self.tables["temporal"]
			behaviors = encode_behavior(behaviors, self.encoder.behavior_buckets(sample), temporal)
			target = encode_behavior(target, [self.encoder.target_bucket(sample)], temporal)
		return behaviors, target


	def tim_forward(self, tape, sample):
		"""Pooled interest u over the encoded behaviors of `sample`.

		Raises
		------
		EmptySequenceError
			If the history is empty.

		InvalidSpecError
			For DIN_SPLIT models, which pool through `din_split_forward`.
		"""
		if self.spec.variant is Variant.DIN_SPLIT:
			raise InvalidSpecError("DIN_SPLIT has separate TA/TR spaces; use din_split_forward")
		n_behaviors = len(sample.history)
		if n_behaviors == 0:
			raise EmptySequenceError("sample history is empty")

		variant = self.spec.variant
		behaviors, target = self._embed(tape, sample)
		if variant.product_in_pool:
			values = ops.hadamard(behaviors, ops.broadcast_rows(target, n_behaviors))
		else:
			values = behaviors

		if variant.ta:
			scale = ops.inverse_sqrt(self.spec.embedding_dim)
			alpha = ops.scaled_dot_softmax(behaviors, target, scale)
			u = ops.weighted_sum(alpha, values)
			logits = ops.scaled_dot_logits(behaviors.value, target.value, scale)[0]
		else:
			alpha = tape.constant(np.full((1, n_behaviors), 1.0 / n_behaviors))
			u = ops.mean_rows(values)
			logits = None
		return TimOutput(u, alpha, behaviors, target, logits, values.value)


	def _split_pool(self, tape, sample):
		n_behaviors = len(sample.history)
		if n_behaviors == 0:
			raise EmptySequenceError("sample history is empty")
		behaviors = semantic_embed(tape, self.tables["category_tr"], self.tables["item_tr"], sample.history)
		target = semantic_embed(tape, self.tables["category_tr"], self.tables["item_tr"], (sample.target,))
		if self.spec.d_ta > 0:
			keys = semantic_embed(tape, self.tables["category_ta"], self.tables["item_ta"], sample.history)
			query = semantic_embed(tape, self.tables["category_ta"], self.tables["item_ta"], (sample.target,))
			alpha = ops.scaled_dot_softmax(keys, query, ops.inverse_sqrt(self.spec.attention_dim))
			u = ops.weighted_sum(alpha, behaviors)
		else:
			u = ops.mean_rows(behaviors)
		return u, target


	def _head(self, tape, u, target):
		if self.spec.variant.tr:
			features = ops.concat_cols(u, target, ops.hadamard(u, target))
		else:
			features = ops.concat_cols(u, target)
		return ops.mlp_forward(features, self._mlp_layers(tape))


	def logit_node(self, tape, sample):
		if self.spec.variant is Variant.DIN_SPLIT:
			u, target = self._split_pool(tape, sample)
		else:
			output = self.tim_forward(tape, sample)
			u, target = output.u, output.target
		return self._head(tape, u, target)


	def logit(self, sample):
		return self.logit_node(Tape(), sample).item()


	def predict(self, sample):
		"""Click probability sigmoid(g_MLP(...)) of one sample."""
		return float(expit(self.logit(sample)))


	def predict_many(self, samples):
		return np.array([self.predict(sample) for sample in samples])


	def din_split_forward(self, sample):
		if self.spec.variant is not Variant.DIN_SPLIT:
			raise InvalidSpecError(f"din_split_forward needs a DIN_SPLIT model, got {self.spec.variant.tag}")
		return self.predict(sample)


	def loss_and_gradients(self, sample):
		"""Cross-entropy of one sample and its gradients.

		Returns
		-------
		loss : float

		gradients : Gradients
			Dense MLP gradients and sparse rows for the looked-up tables.
		"""
		tape = Tape()
		loss = ops.xent(self.logit_node(tape, sample), sample.label)
		return loss.item(), tape.backward(loss)


	def extract_learned_ctc_terms(self, sample):
		"""Per-behavior attention e^z and representation norm ||r||_2.

		Raises
		------
		UnsupportedVariantError
			For variants outside TIN, its three ablations and DIN.
		"""
		variant = self.spec.variant
		if variant not in LEARNED_CTC_VARIANTS:
			raise UnsupportedVariantError(
				f"learned correlation is not defined for {variant.tag}; "
				f"supported: {', '.join(sorted(v.tag for v in LEARNED_CTC_VARIANTS))}"
			)

		tape = Tape()
		behaviors, target = self._embed(tape, sample)
		behaviors, target = behaviors.value, target.value
		if variant.ta:
			logits = ops.scaled_dot_logits(behaviors, target, ops.inverse_sqrt(self.spec.embedding_dim))[0]
			attention = np.exp(logits)
		else:
			logits = None
			attention = np.ones(len(sample.history))

		if variant.tr:
			representation = behaviors * target
		else:
			representation = behaviors
		return LearnedTerms(logits, attention, np.linalg.norm(representation, axis=1))


	def zero_temporal(self):
		if "temporal" in self.tables:
			self.tables["temporal"].weights[:] = 0.0


	def __repr__(self):
		return f"TinModel({self.spec.variant.tag}, encoder={self.spec.encoder.value}, code={self.spec.code})"

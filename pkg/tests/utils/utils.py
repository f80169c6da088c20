import numpy as np

from src.data import Interaction, Sample
from src.encoding import EncoderKind, TemporalEncoder
from src.metrics import EvalRecord
from src.model import ModelSpec, TinModel, Variant
from src.tensor import Tape


N_CATEGORIES = 5
N_ITEMS = 20
MAX_LEN = 8
TTE_T_EDGES = (500.0, 2000.0, 6000.0)


def _sample_n_random_samples(n_samples, max_len=6, n_categories=N_CATEGORIES, n_items=N_ITEMS, random_state=2):
	"""Random labeled samples; item i has category i % n_categories."""
	rng = np.random.default_rng(random_state)
	samples = []
	for s in range(n_samples):
		user_id = s // 2
		length = int(rng.integers(1, max_len + 1))
		timestamps = 1_000_000 + np.cumsum(rng.integers(1, 5000, size=length + 1))
		items = rng.integers(n_items, size=length + 1)
		interactions = [
			Interaction(user_id, int(item), int(item) % n_categories, int(ts))
			for item, ts in zip(items, timestamps)
		]
		samples.append(Sample(tuple(interactions[:-1]), interactions[-1], int(rng.integers(2))))
	return samples


def _sample_n_random_records(n_records, n_users=5, random_state=2):
	rng = np.random.default_rng(random_state)
	return [
		EvalRecord(int(rng.integers(n_users)), int(rng.integers(2)), float(rng.choice([0.1, 0.3, 0.5, 0.7, rng.random()])))
		for _ in range(n_records)
	]


def _default_encoder(variant):
	return EncoderKind.TTE_P if variant.ti else EncoderKind.NONE


def _small_model(variant, seed=0, scale=50.0, encoder=None, d_ta=3, d_tr=3, mlp_dims=(4,)):
	"""Toy model whose embeddings are scaled up from the init range so gradients are not tiny."""
	variant = Variant(variant)
	kind = encoder if encoder is not None else _default_encoder(variant)
	spec = ModelSpec(variant, kind, d_cat=3, d_item=3, mlp_dims=mlp_dims, d_ta=d_ta, d_tr=d_tr)
	temporal = TemporalEncoder.create(kind, max_len=MAX_LEN, bin_edges=TTE_T_EDGES) if variant.ti else None
	model = TinModel(spec, N_CATEGORIES, N_ITEMS, temporal, seed=seed)
	for table in model.tables.values():
		table.weights *= scale
	return model


def _trainable(model):
	params = {name: table.weights for name, table in model.tables.items()}
	params.update(model.params)
	return params


def _brute_force_auc(labels, scores):
	correct, pairs = 0.0, 0
	for label_i, score_i in zip(labels, scores):
		if label_i != 1:
			continue
		for label_j, score_j in zip(labels, scores):
			if label_j != 0:
				continue
			pairs += 1
			correct += 1.0 if score_i > score_j else 0.5 if score_i == score_j else 0.0
	return correct / pairs


def _brute_force_mi(x, y):
	"""MI from an explicit 2x2 joint-count table."""
	n = len(x)
	mi = 0.0
	for a in (0, 1):
		for b in (0, 1):
			n_ab = sum(1 for xi, yi in zip(x, y) if xi == a and yi == b)
			if n_ab == 0:
				continue
			n_a = sum(1 for xi in x if xi == a)
			n_b = sum(1 for yi in y if yi == b)
			mi += (n_ab / n) * np.log(n_ab * n / (n_a * n_b))
	return mi


def _history_with_intervals(intervals, user_id=0, target_timestamp=10_000_000, category=0, item=0):
	"""A sample whose behaviors sit `intervals` seconds before the target (oldest first)."""
	history = tuple(
		Interaction(user_id, item, category, target_timestamp - int(tau))
		for tau in sorted(intervals, reverse=True)
	)
	return Sample(history, Interaction(user_id, item, category, target_timestamp), 1)


def _relu_margin(model, sample):
	"""Smallest |pre-activation| of the hidden MLP units on `sample`.

	Finite differences are meaningless for samples sitting on a ReLU kink.
	"""
	tape = Tape()
	model.logit_node(tape, sample)
	hidden = {
		id(node) for name, node in tape._parameters
		if name.startswith("mlp.") and name.endswith(".weight") and name != f"mlp.{model.n_layers - 1}.weight"
	}
	pre_activations = [
		node.value for node in tape.nodes
		if len(node.inputs) == 3 and id(node.inputs[1]) in hidden
	]
	return min(float(np.min(np.abs(value))) for value in pre_activations)

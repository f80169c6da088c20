from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit

from .records import Interaction, Sample


SECONDS_PER_WEEK = 7 * 24 * 3600
FIRST_TIMESTAMP = 1_300_000_000


@dataclass(frozen=True)
class SynthParams:
	"""Planted semantic-temporal pattern.

	A target of category c_t is clicked with probability
	sigmoid(base_logit + match_boost * sum_i [c_i == c_t] * decay**pos_i),
	pos_i being the target-relative position (1 = most recent).
	"""
	n_users: int
	n_categories: int
	h_max: int
	decay: float
	match_boost: float
	base_logit: float
	seed: int
	items_per_category: int = 10
	min_len: int | None = None
	targets_per_user: int = 4

	def __post_init__(self):
		if self.min_len is None:
			object.__setattr__(self, "min_len", max(1, self.h_max // 2))

	def validate(self):
		errors = []
		if self.n_users < 1:
			errors.append("n_users must be >= 1")
		if self.n_categories < 1:
			errors.append("n_categories must be >= 1")
		if self.h_max < 1:
			errors.append("h_max must be >= 1")
		if not 0.0 < self.decay <= 1.0:
			errors.append("decay must lie in (0, 1]")
		if not (math.isfinite(self.match_boost) and math.isfinite(self.base_logit)):
			errors.append("match_boost and base_logit must be finite")
		if self.items_per_category < 1:
			errors.append("items_per_category must be >= 1")
		if not 1 <= self.min_len <= self.h_max:
			errors.append("min_len must lie in [1, h_max]")
		if self.targets_per_user < 1:
			errors.append("targets_per_user must be >= 1")
		if errors:
			raise ValueError("; ".join(errors))

	def header(self):
		return {f"synth.{key}": value for key, value in asdict(self).items()}

	@classmethod
	def from_header(cls, header):
		kwargs = {}
		for name, kind in (
			("n_users", int), ("n_categories", int), ("h_max", int),
			("decay", float), ("match_boost", float), ("base_logit", float),
			("seed", int), ("items_per_category", int), ("min_len", int),
			("targets_per_user", int),
		):
			kwargs[name] = kind(header[f"synth.{name}"])
		return cls(**kwargs)


@dataclass
class SyntheticDataset:
	samples: list
	params: SynthParams
	n_items: int = field(init=False)

	def __post_init__(self):
		self.n_items = self.params.n_categories * self.params.items_per_category


def planted_logit(params, history_categories, target_category):
	positions = np.arange(len(history_categories), 0, -1)
	matches = np.asarray(history_categories) == target_category
	return params.base_logit + params.match_boost * float(np.sum(matches * params.decay ** positions))


def synth_generate(n_users, n_categories, h_max, decay, match_boost, base_logit, seed, items_per_category=10, min_len=None, targets_per_user=4):
	"""Generate a labeled dataset with a planted semantic-temporal pattern.

	Each user gets one history of uniform-random categories with increasing
	timestamps and `targets_per_user` targets of uniform-random category,
	each labeled by a Bernoulli draw from the planted click probability.
	Item ids are category * items_per_category + j.

	Returns
	-------
	dataset : SyntheticDataset
		Samples ordered by user; `dataset.params.header()` records the
		planted ground truth.
	"""
	params = SynthParams(
		n_users, n_categories, h_max, decay, match_boost, base_logit, seed,
		items_per_category, min_len, targets_per_user,
	)
	params.validate()
	rng = np.random.default_rng(seed)

	samples = []
	for user_id in range(params.n_users):
		length = int(rng.integers(params.min_len, params.h_max + 1))
		categories = rng.integers(params.n_categories, size=length)
		items = categories * params.items_per_category + rng.integers(params.items_per_category, size=length)
		timestamps = FIRST_TIMESTAMP + np.cumsum(rng.integers(1, SECONDS_PER_WEEK, size=length))
		history = tuple(
			Interaction(user_id, int(item), int(category), int(timestamp))
			for item, category, timestamp in zip(items, categories, timestamps)
		)

		for _ in range(params.targets_per_user):
			target_category = int(rng.integers(params.n_categories))
			target_item = target_category * params.items_per_category + int(rng.integers(params.items_per_category))
			target_timestamp = int(timestamps[-1]) + int(rng.integers(1, SECONDS_PER_WEEK))
			probability = expit(planted_logit(params, categories, target_category))
			label = int(rng.random() < probability)
			target = Interaction(user_id, target_item, target_category, target_timestamp)
			samples.append(Sample(history, target, label))

	return SyntheticDataset(samples, params)


def split_synthetic(samples, test_fraction=0.2):
	"""Partition by user: the last ceil(test_fraction * n_users) users go to test."""
	if not 0.0 < test_fraction < 1.0:
		raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
	users = sorted({sample.user_id for sample in samples})
	n_test = max(1, math.ceil(test_fraction * len(users)))
	test_users = set(users[len(users) - n_test:])
	train = [sample for sample in samples if sample.user_id not in test_users]
	test = [sample for sample in samples if sample.user_id in test_users]
	return train, test

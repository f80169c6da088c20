from __future__ import annotations

import logging
from collections import defaultdict

import numpy as np

from .records import Interaction, Sample
from ..errors import EmptyDatasetError


logger = logging.getLogger(__name__)


def group_by_user(interactions):
	"""User id -> interactions sorted by timestamp (ties keep input order)."""
	by_user = defaultdict(list)
	for interaction in interactions:
		by_user[interaction.user_id].append(interaction)
	for history in by_user.values():
		history.sort(key=lambda interaction: interaction.timestamp)
	return by_user


def sample_negative_item(rng, n_items, positive_item):
	item = int(rng.integers(n_items))
	while item == positive_item:
		item = int(rng.integers(n_items))
	return item


def make_samples(history, target, neg_per_pos, rng, n_items, item_categories):
	"""The positive sample for `target` followed by its negatives.

	A negative keeps the history and target timestamp and swaps the target
	item for a uniformly drawn other item (its category follows the item).
	"""
	samples = [Sample(history, target, 1)]
	for _ in range(neg_per_pos):
		item = sample_negative_item(rng, n_items, target.item_id)
		negative_target = Interaction(target.user_id, item, item_categories[item], target.timestamp)
		samples.append(Sample(history, negative_target, 0))
	return samples


def build_leave_one_out(interactions, max_len, seed, min_user_len=5, neg_per_pos=1, item_categories=None, n_items=None):
	"""Leave-one-out train/test samples with random negatives.

	For a user with n interactions (sorted by time), interaction n is the
	test positive with the first n-1 as history, and every prefix of length
	k in 1..n-2 predicts interaction k+1 as a train positive. Histories keep
	the most recent `max_len` behaviors.

	Parameters
	----------
	interactions : list of Interaction

	max_len : int
		History truncation length.

	seed : int
		Required. Each user draws negatives from its own generator seeded
		with (seed, user_id), so the result does not depend on user order.

	min_user_len : int, default=5
		Users with fewer interactions are dropped.

	neg_per_pos : int, default=1
		Negatives per positive, train and test alike.

	item_categories : dict[int, int] or None
		Item id -> category id; derived from `interactions` if None.

	n_items : int or None
		Size of the item id space to draw negatives from; derived if None.

	Returns
	-------
	train, test : list of Sample
	"""
	if seed is None:
		raise ValueError("build_leave_one_out needs an explicit seed")
	if max_len < 1:
		raise ValueError(f"max_len must be >= 1, got {max_len}")
	if min_user_len < 2:
		raise ValueError(f"min_user_len must be >= 2, got {min_user_len}")

	if item_categories is None:
		item_categories = {}
		for interaction in interactions:
			item_categories.setdefault(interaction.item_id, interaction.category_id)
	if n_items is None:
		n_items = max(item_categories) + 1 if item_categories else 0
	if neg_per_pos > 0 and n_items < 2:
		raise EmptyDatasetError("negative sampling needs at least 2 items")

	by_user = group_by_user(interactions)
	train, test = [], []
	n_eligible = 0
	for user_id in sorted(by_user):
		sequence = by_user[user_id]
		n = len(sequence)
		if n < min_user_len:
			continue
		n_eligible += 1
		rng = np.random.default_rng([seed, user_id])

		for k in range(1, n - 1):
			history = tuple(sequence[max(0, k - max_len):k])
			train.extend(make_samples(history, sequence[k], neg_per_pos, rng, n_items, item_categories))

		history = tuple(sequence[max(0, n - 1 - max_len):n - 1])
		test.extend(make_samples(history, sequence[n - 1], neg_per_pos, rng, n_items, item_categories))

	if n_eligible == 0:
		raise EmptyDatasetError(f"no user has at least {min_user_len} interactions")

	logger.debug(
		"leave-one-out split built",
		extra={"extra_data": {"users": n_eligible, "train": len(train), "test": len(test)}},
	)
	return train, test

"""Ground-truth and learned category-wise target-aware correlation (CTC)."""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .grid import CorrelationGrid, GridKind
from .pearson import bin_distribution, pearson_compare
from ..errors import EmptyGridError


logger = logging.getLogger(__name__)

ABSENT = -1
AGGREGATES = {"mean": np.mean, "median": np.median}


def restrict(samples, target_category):
	return [sample for sample in samples if sample.target.category_id == target_category]


def position_categories(samples, n_positions):
	"""N x P category ids; column p-1 is the behavior at target-relative position p.

	Positions past the start of a short history hold ABSENT.
	"""
	table = np.full((len(samples), n_positions), ABSENT, dtype=np.int64)
	for row, sample in enumerate(samples):
		recent = [behavior.category_id for behavior in reversed(sample.history[-n_positions:])]
		table[row, :len(recent)] = recent
	return table


def mutual_information(x, y):
	"""Empirical MI (nats) of two binary arrays; 0 ln(0/q) is 0.

	`x` may be N x P, giving one MI per column against the length-N `y`.
	"""
	x = np.asarray(x, dtype=bool)
	y = np.asarray(y, dtype=bool)
	if x.ndim == 1:
		return float(mutual_information(x[:, None], y)[0])
	n = float(len(y))
	if n == 0:
		raise EmptyGridError("mutual information of an empty sample")

	total = np.zeros(x.shape[1])
	for x_value in (True, False):
		x_match = x == x_value
		n_x = x_match.sum(axis=0).astype(np.float64)
		for y_value in (True, False):
			y_match = (y == y_value)[:, None]
			n_y = float(y_match.sum())
			n_xy = (x_match & y_match).sum(axis=0).astype(np.float64)
			with np.errstate(divide="ignore", invalid="ignore"):
				ratio = np.where(n_xy > 0, (n_xy * n) / (n_x * n_y), 1.0)
			total += xlogy(n_xy / n, ratio)
	return total


def ground_truth_ctc(samples, target_category, row_categories, n_positions=10):
	"""MI between "category c at position p" and the label, per (c, p).

	Only samples whose target has `target_category` are counted; a history
	shorter than p counts as x = 0 at p.

	Raises
	------
	EmptyGridError
		If no sample has the target category.
	"""
	restricted = restrict(samples, target_category)
	if not restricted:
		raise EmptyGridError(f"no samples with target category {target_category}")

	categories = position_categories(restricted, n_positions)
	labels = np.array([sample.label for sample in restricted], dtype=bool)
	values = np.array([mutual_information(categories == category, labels) for category in row_categories])
	values = np.maximum(values, 0.0).reshape(len(row_categories), n_positions)
	return CorrelationGrid(
		target_category,
		row_categories,
		range(1, n_positions + 1),
		values,
		GridKind.GROUND_TRUTH,
		{"log_base": "e", "absent_position": "x=0", "n_samples": len(restricted)},
	)


def top_categories(samples, k=5, target_category=None):
	"""The k most frequent behavior categories, ties broken by smaller id."""
	if target_category is not None:
		samples = restrict(samples, target_category)
	counts = Counter(behavior.category_id for sample in samples for behavior in sample.history)
	return [category for category, _ in sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]]


def top_target_categories(samples, n=10):
	counts = Counter(sample.target.category_id for sample in samples)
	return [category for category, _ in sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:n]]


def learned_ctc(model, samples, target_category, row_categories, n_positions=10, aggregate="mean", threads=1):
	"""e^z * ||r||_2 averaged over every (category, position) occurrence.

	Cells with no occurrence are NaN. `aggregate` is "mean" or "median".
	With `threads` > 1 the per-sample terms are extracted on a thread pool
	and merged in sample order.
	"""
	if aggregate not in AGGREGATES:
		raise ValueError(f"aggregate must be one of {sorted(AGGREGATES)}, got {aggregate!r}")
	restricted = restrict(samples, target_category)
	if not restricted:
		raise EmptyGridError(f"no samples with target category {target_category}")

	rows = {category: k for k, category in enumerate(row_categories)}
	occurrences = defaultdict(list)
	if threads > 1:
		with ThreadPoolExecutor(max_workers=threads) as executor:
			terms = list(executor.map(model.extract_learned_ctc_terms, restricted))
	else:
		terms = [model.extract_learned_ctc_terms(sample) for sample in restricted]

	for sample, sample_terms in zip(restricted, terms):
		correlation = sample_terms.correlation
		for position in range(1, min(n_positions, len(sample.history)) + 1):
			category = sample.history[-position].category_id
			if category in rows:
				occurrences[rows[category], position - 1].append(correlation[-position])

	values = np.full((len(row_categories), n_positions), np.nan)
	for (k, column), cell in occurrences.items():
		values[k, column] = AGGREGATES[aggregate](cell)
	return CorrelationGrid(
		target_category,
		row_categories,
		range(1, n_positions + 1),
		values,
		GridKind.LEARNED,
		{
			"model": model.spec.variant.tag,
			"encoder": model.spec.encoder.value,
			"aggregate": aggregate,
			"attention_logit": "z=<e,v>/sqrt(d)",
			"n_samples": len(restricted),
		},
	)


@dataclass(frozen=True)
class SequenceCtcRow:
	position: int
	category: int
	ground_truth: float | None
	learned: float


def sequence_ctc(model, sample, ground_truth, n_positions=10):
	"""Ground-truth and learned correlation of the latest behaviors of one sample.

	Ground truth is looked up by (category, position) in `ground_truth` and
	is None where the grid has no such row.
	"""
	correlation = model.extract_learned_ctc_terms(sample).correlation
	rows = []
	for position in range(1, min(n_positions, len(sample.history)) + 1):
		category = sample.history[-position].category_id
		truth = None
		if category in ground_truth.row_categories and position in ground_truth.positions:
			truth = ground_truth.cell(category, position)
		rows.append(SequenceCtcRow(position, category, truth, float(correlation[-position])))
	return rows


def category_sweep(model, samples, target_categories, n_positions=10, aggregate="mean", threads=1):
	"""Matching-row Pearson report for each target category.

	Target categories whose learned matching row has fewer than two
	observed positions are skipped with a warning.

	Returns
	-------
	reports : list of PearsonReport

	distribution : list of (bin, count, fraction)
	"""
	reports = []
	for target_category in target_categories:
		truth = ground_truth_ctc(samples, target_category, [target_category], n_positions)
		learned = learned_ctc(model, samples, target_category, [target_category], n_positions, aggregate, threads)
		if np.count_nonzero(~learned.missing) < 2:
			logger.warning(
				"skipping target category with too few observed positions",
				extra={"extra_data": {"target_category": target_category}},
			)
			continue
		reports.append(pearson_compare(truth, learned))
	return reports, bin_distribution(reports)

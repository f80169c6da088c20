"""Logloss, AUC and impression-weighted group AUC."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import EmptyDatasetError, UndefinedMetricError


PROB_CLIP = 1e-15
LENGTH_EDGES = (1, 5, 10, 15, 20)
REPORT_HEADER = ("model", "variant_code", "logloss", "gauc", "n_records", "n_users")


@dataclass(frozen=True)
class EvalRecord:
	user_id: int
	label: int
	probability: float

	def __post_init__(self):
		if self.label not in (0, 1):
			raise ValueError(f"label must be 0 or 1, got {self.label!r}")
		if not (np.isfinite(self.probability) and 0.0 <= self.probability <= 1.0):
			raise ValueError(f"probability must be finite and in [0, 1], got {self.probability!r}")


def _labels_and_scores(records):
	labels = np.array([record.label for record in records], dtype=np.int64)
	scores = np.array([record.probability for record in records], dtype=np.float64)
	return labels, scores


def logloss(records):
	if not records:
		raise EmptyDatasetError("logloss of an empty record set")
	labels, scores = _labels_and_scores(records)
	p = np.clip(scores, PROB_CLIP, 1.0 - PROB_CLIP)
	return float(-np.mean(labels * np.log(p) + (1 - labels) * np.log(1.0 - p)))


def auc_from_scores(labels, scores):
	"""Mann-Whitney AUC; tied scores count 0.5 per (positive, negative) pair."""
	labels = np.asarray(labels)
	n_pos = int(labels.sum())
	n_neg = labels.size - n_pos
	if n_pos == 0 or n_neg == 0:
		raise UndefinedMetricError(f"AUC needs both classes, got {n_pos} positives and {n_neg} negatives")
	ranks = rankdata(scores, method="average")
	return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc(records):
	return auc_from_scores(*_labels_and_scores(records))


def _by_user(records):
	groups = defaultdict(list)
	for record in records:
		groups[record.user_id].append(record)
	return groups


def _eligible_groups(records):
	"""Users holding both a positive and a negative, in user id order."""
	groups = _by_user(records)
	return [
		(user_id, groups[user_id]) for user_id in sorted(groups)
		if 0 < sum(record.label for record in groups[user_id]) < len(groups[user_id])
	]


def gauc(records):
	"""Sum_u w_u AUC_u / Sum_u w_u with w_u the user's record count.

	Single-class users are left out of both sums.

	Raises
	------
	UndefinedMetricError
		If no user has both classes.
	"""
	eligible = _eligible_groups(records)
	if not eligible:
		raise UndefinedMetricError("GAUC needs at least one user with both a positive and a negative")
	weights = np.array([len(group) for _, group in eligible], dtype=np.float64)
	aucs = np.array([auc(group) for _, group in eligible])
	return float(np.sum(weights * aucs) / np.sum(weights))


def length_bucket_labels(edges=LENGTH_EDGES):
	labels = [f"[{low},{high})" for low, high in zip(edges[:-1], edges[1:])]
	labels.append(f"[{edges[-1]},inf)")
	return labels


def gauc_by_length(records, lengths, edges=LENGTH_EDGES):
	"""GAUC restricted to records whose history length falls in each range.

	Returns
	-------
	rows : list of (range, gauc or None, n_records)
		One row per range [edges[k], edges[k+1]) plus [edges[-1], inf);
		gauc is None where no user in the range has both classes.
	"""
	lengths = np.asarray(lengths)
	if len(lengths) != len(records):
		raise ValueError(f"{len(lengths)} lengths for {len(records)} records")
	bucket_ids = np.searchsorted(np.asarray(edges), lengths, side="right") - 1
	rows = []
	for k, label in enumerate(length_bucket_labels(edges)):
		subset = [record for record, bucket in zip(records, bucket_ids) if bucket == k]
		value = gauc(subset) if _eligible_groups(subset) else None
		rows.append((label, value, len(subset)))
	return rows


@dataclass(frozen=True)
class EvalReport:
	model: str
	variant_code: str
	logloss: float
	gauc: float
	n_records: int
	n_users: int

	def as_row(self):
		return [self.model, self.variant_code, format(self.logloss, ".6f"), format(self.gauc, ".6f"), self.n_records, self.n_users]


def eval_records(model, samples):
	return [EvalRecord(sample.user_id, sample.label, model.predict(sample)) for sample in samples]


def summarize_records(records, name, variant_code):
	"""EvalReport of scored records; `n_users` counts the users that enter the GAUC."""
	return EvalReport(
		model=name,
		variant_code=variant_code,
		logloss=logloss(records),
		gauc=gauc(records),
		n_records=len(records),
		n_users=len(_eligible_groups(records)),
	)


def evaluate(model, samples, name=None):
	"""Score `samples` with `model` and summarize."""
	return summarize_records(eval_records(model, samples), name or model.spec.variant.tag, model.spec.code)


def write_report(f, reports, header=REPORT_HEADER, extra_rows=()):
	"""Write report rows as CSV to the open text file `f`."""
	writer = csv.writer(f, lineterminator="\n")
	writer.writerow(header)
	for report in reports:
		writer.writerow(report.as_row())
	writer.writerows(extra_rows)

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import BinningError, DimensionError, IndexRangeError
from ..tensor import ops


logger = logging.getLogger(__name__)

TARGET_BUCKET = 0


class EncoderKind(Enum):
	TTE_P = "tte-p"
	TTE_T = "tte-t"
	COE = "coe"
	NONE = "none"


def _check_index(sample, i):
	if not 1 <= i <= len(sample.history):
		raise IndexRangeError(f"behavior index {i} outside 1..{len(sample.history)}")


def tte_p(sample, i, n_buckets):
	"""Target-relative position H-i+1 of the i-th (1-based) behavior, clamped."""
	_check_index(sample, i)
	return min(len(sample.history) - i + 1, n_buckets - 1)


def coe(sample, i, n_buckets):
	"""Chronological index i of the i-th (1-based) behavior, clamped."""
	_check_index(sample, i)
	return min(i, n_buckets - 1)


def time_intervals(sample):
	return np.array(
		[sample.target.timestamp - behavior.timestamp for behavior in sample.history],
		dtype=np.int64,
	)


def bucketize_intervals(intervals, bin_edges):
	"""Bucket 1..n for each interval; an interval equal to an edge falls in the lower bucket."""
	return np.searchsorted(np.asarray(bin_edges), intervals, side="left") + 1


def tte_t(sample, i, bin_edges):
	_check_index(sample, i)
	return int(bucketize_intervals(time_intervals(sample)[i - 1:i], bin_edges)[0])


def fit_tte_t_bins(samples, n_buckets=10):
	"""Equal-frequency edges of the behavior-to-target time intervals.

	The edges are the k/n_buckets quantiles (k = 1..n_buckets-1, lower
	empirical quantile) of tau_i = TS_t - TS_i over every behavior of every
	sample. Fit on training samples only.

	Returns
	-------
	bin_edges : tuple of float
		Strictly increasing, length n_buckets - 1.

	Raises
	------
	BinningError
		If there are fewer than `n_buckets` distinct positive intervals or
		the quantiles collapse.
	"""
	if n_buckets < 2:
		raise BinningError(f"n_buckets must be >= 2, got {n_buckets}")
	intervals = np.concatenate([time_intervals(sample) for sample in samples]) if samples else np.array([], dtype=np.int64)
	n_distinct = np.unique(intervals[intervals > 0]).size
	if n_distinct < n_buckets:
		raise BinningError(
			f"only {n_distinct} distinct positive time intervals for {n_buckets} buckets; "
			f"use fewer buckets"
		)

	quantiles = np.arange(1, n_buckets) / n_buckets
	edges = np.quantile(intervals, quantiles, method="inverted_cdf").astype(np.float64)
	if np.any(np.diff(edges) <= 0):
		raise BinningError(f"interval quantiles collapse for {n_buckets} buckets; use fewer buckets")
	return tuple(float(edge) for edge in edges)


@dataclass(frozen=True)
class TemporalEncoder:
	"""f(.) mapping behaviors and the target to temporal bucket ids.

	Bucket 0 is the origin: the target under TTE-P and TTE-T.
	"""
	kind: EncoderKind
	n_buckets: int = 0
	bin_edges: tuple = ()

	@classmethod
	def create(cls, kind, max_len=100, n_time_buckets=10, train_samples=None, bin_edges=None):
		kind = EncoderKind(kind)
		if kind is EncoderKind.TTE_P:
			return cls(kind, max_len + 1)
		if kind is EncoderKind.COE:
			logger.info("COE has no target position; the target is encoded as H+1 (clamped)")
			return cls(kind, max_len + 2)
		if kind is EncoderKind.TTE_T:
			if bin_edges is None:
				bin_edges = fit_tte_t_bins(train_samples or [], n_time_buckets)
			return cls(kind, len(bin_edges) + 2, tuple(bin_edges))
		return cls(EncoderKind.NONE, 0)


	@property
	def enabled(self):
		return self.kind is not EncoderKind.NONE


	def behavior_buckets(self, sample):
		length = len(sample.history)
		if self.kind is EncoderKind.TTE_P:
			return np.minimum(np.arange(length, 0, -1), self.n_buckets - 1)
		if self.kind is EncoderKind.COE:
			return np.minimum(np.arange(1, length + 1), self.n_buckets - 1)
		if self.kind is EncoderKind.TTE_T:
			return bucketize_intervals(time_intervals(sample), self.bin_edges)
		raise ValueError("encoder NONE has no buckets")


	def target_bucket(self, sample):
		if self.kind is EncoderKind.COE:
			return min(len(sample.history) + 1, self.n_buckets - 1)
		return TARGET_BUCKET


	def bucket(self, sample, i):
		if self.kind is EncoderKind.TTE_P:
			return tte_p(sample, i, self.n_buckets)
		if self.kind is EncoderKind.COE:
			return coe(sample, i, self.n_buckets)
		if self.kind is EncoderKind.TTE_T:
			return tte_t(sample, i, self.bin_edges)
		raise ValueError("encoder NONE has no buckets")


def encode_behavior(semantic, bucket_ids, temporal_table):
	"""e~ = e (+) p_f(X): element-wise sum of semantic rows and temporal rows.

	`temporal_table` None means encoder NONE and returns `semantic` as is.
	"""
	if temporal_table is None:
		return semantic
	if temporal_table.dim != semantic.shape[1]:
		raise DimensionError(f"temporal dim {temporal_table.dim} != semantic dim {semantic.shape[1]}")
	temporal = semantic.tape.lookup(temporal_table, bucket_ids)
	return ops.add(semantic, temporal)

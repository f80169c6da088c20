from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.stats import pearsonr

from ..errors import DimensionError, EmptyGridError


class PearsonBin(Enum):
	"""Coefficient bins: poor [-1, 0.2], medium (0.2, 0.8], strong (0.8, 1]."""
	POOR = "poor"
	MEDIUM = "medium"
	STRONG = "strong"


POOR_UPPER = 0.2
MEDIUM_UPPER = 0.8
# spread at or below this fraction of the row's magnitude counts as constant
CONSTANT_RTOL = 1e-9


def bin_of(coefficient):
	if coefficient <= POOR_UPPER:
		return PearsonBin.POOR
	if coefficient <= MEDIUM_UPPER:
		return PearsonBin.MEDIUM
	return PearsonBin.STRONG


@dataclass(frozen=True)
class PearsonReport:
	target_category: int
	coefficient: float
	bin: PearsonBin

	def as_row(self):
		return [self.target_category, format(self.coefficient, ".6f"), self.bin.value]


def _is_constant(row):
	return np.ptp(row) <= CONSTANT_RTOL * np.max(np.abs(row))


def pearson_coefficient(truth, learned):
	"""Pearson r of two rows; 0 when either row is constant up to rounding."""
	truth = np.asarray(truth, dtype=np.float64)
	learned = np.asarray(learned, dtype=np.float64)
	if truth.size < 2 or truth.size != learned.size:
		raise DimensionError(f"pearson needs two equal rows of length >= 2, got {truth.size} and {learned.size}")
	if _is_constant(truth) or _is_constant(learned):
		return 0.0
	return float(np.clip(pearsonr(truth, learned).statistic, -1.0, 1.0))


def pearson_compare(truth, learned, category=None):
	"""Compare the `category` row (default: the target category) of two grids.

	Positions missing in either grid are dropped from the comparison.
	"""
	if truth.positions != learned.positions:
		raise DimensionError(f"grids cover different positions: {truth.positions} vs {learned.positions}")
	category = truth.target_category if category is None else category
	try:
		truth_row, learned_row = truth.row(category), learned.row(category)
	except KeyError as e:
		raise EmptyGridError(f"matching row missing: {e}") from None

	observed = ~(np.isnan(truth_row) | np.isnan(learned_row))
	if len(truth.positions) < 2:
		raise DimensionError(f"pearson needs at least 2 positions, got {len(truth.positions)}")
	if observed.sum() < 2:
		raise EmptyGridError(f"category {category} has {observed.sum()} observed positions, need 2")
	coefficient = pearson_coefficient(truth_row[observed], learned_row[observed])
	return PearsonReport(truth.target_category, coefficient, bin_of(coefficient))


def bin_distribution(reports):
	counts = {bin_: 0 for bin_ in PearsonBin}
	for report in reports:
		counts[report.bin] += 1
	total = len(reports)
	return [(bin_.value, count, count / total if total else 0.0) for bin_, count in counts.items()]


def write_pearson_reports(reports, path):
	with Path(path).open("w", encoding="utf-8", newline="") as f:
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(["target_category", "coefficient", "bin"])
		writer.writerows(report.as_row() for report in reports)


def write_bin_distribution(distribution, path):
	with Path(path).open("w", encoding="utf-8", newline="") as f:
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(["bin", "count", "fraction"])
		writer.writerows([name, count, format(fraction, ".6f")] for name, count, fraction in distribution)

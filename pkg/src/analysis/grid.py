from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from ..errors import DimensionError, ParseError


class GridKind(Enum):
	GROUND_TRUTH = "ground_truth"
	LEARNED = "learned"


@dataclass
class CorrelationGrid:
	"""Category x target-relative position correlation values.

	`values[k, p - 1]` belongs to `row_categories[k]` at position p.
	Missing cells (no occurrence) hold NaN.
	"""
	target_category: int
	row_categories: tuple
	positions: tuple
	values: np.ndarray
	kind: GridKind
	metadata: dict = field(default_factory=dict)

	def __post_init__(self):
		self.row_categories = tuple(int(c) for c in self.row_categories)
		self.positions = tuple(int(p) for p in self.positions)
		self.values = np.asarray(self.values, dtype=np.float64).reshape(len(self.row_categories), len(self.positions))
		self.kind = GridKind(self.kind)
		self.metadata = {str(key): str(value) for key, value in self.metadata.items()}
		if self.kind is GridKind.GROUND_TRUTH:
			if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
				raise DimensionError("ground-truth grid values must be finite and >= 0")


	@property
	def shape(self):
		return self.values.shape


	@property
	def missing(self):
		return np.isnan(self.values)


	def row(self, category):
		try:
			return self.values[self.row_categories.index(category)]
		except ValueError:
			raise KeyError(f"category {category} is not a row of this grid") from None


	def cell(self, category, position):
		value = self.row(category)[self.positions.index(position)]
		return None if np.isnan(value) else float(value)


	def equals(self, other):
		return (
			self.target_category == other.target_category
			and self.row_categories == other.row_categories
			and self.positions == other.positions
			and self.kind is other.kind
			and self.metadata == other.metadata
			and np.array_equal(self.values, other.values, equal_nan=True)
		)


def _format_cell(value):
	return "" if np.isnan(value) else format(float(value), ".17g")


def export_grid(grid, path):
	"""Write `grid` as CSV preceded by `# key: value` metadata lines."""
	header = {"target_category": grid.target_category, "kind": grid.kind.value, **grid.metadata}
	with Path(path).open("w", encoding="utf-8", newline="") as f:
		for key, value in header.items():
			f.write(f"# {key}: {value}\n")
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(["category", *grid.positions])
		for category, row in zip(grid.row_categories, grid.values):
			writer.writerow([category, *(_format_cell(value) for value in row)])


def read_grid(path):
	path = Path(path)
	metadata, rows = {}, []
	with path.open("r", encoding="utf-8") as f:
		lines = f.read().splitlines()
	data_lines = []
	for line_number, line in enumerate(lines, start=1):
		if line.startswith("#"):
			key, _, value = line[1:].partition(":")
			metadata[key.strip()] = value.strip()
		elif line.strip():
			data_lines.append((line_number, line))
	if not data_lines:
		raise ParseError(path, len(lines), "grid has no header row")

	reader = csv.reader(line for _, line in data_lines)
	header = next(reader)
	try:
		positions = [int(p) for p in header[1:]]
	except ValueError:
		raise ParseError(path, data_lines[0][0], "positions must be integers") from None
	for (line_number, _), fields in zip(data_lines[1:], reader):
		if len(fields) != len(header):
			raise ParseError(path, line_number, f"expected {len(header)} fields, got {len(fields)}")
		try:
			rows.append((int(fields[0]), [float(v) if v else np.nan for v in fields[1:]]))
		except ValueError:
			raise ParseError(path, line_number, "non-numeric grid value") from None

	try:
		target_category = int(metadata.pop("target_category"))
		kind = GridKind(metadata.pop("kind"))
	except (KeyError, ValueError):
		raise ParseError(path, 1, "grid metadata needs target_category and kind") from None
	return CorrelationGrid(
		target_category,
		[category for category, _ in rows],
		positions,
		np.array([values for _, values in rows]).reshape(len(rows), len(positions)),
		kind,
		metadata,
	)

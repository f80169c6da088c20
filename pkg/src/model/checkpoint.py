"""Line-oriented text checkpoints.

Floats are written with 17 significant digits so a load-save cycle is
lossless and two runs with equal seeds produce byte-identical files.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .network import TinModel
from .spec import ModelSpec, Variant
from ..encoding import EncoderKind, TemporalEncoder
from ..errors import ParseError


MAGIC = "tin-checkpoint"
VERSION = 1


def _format_floats(values):
	return " ".join(format(float(value), ".17g") for value in values)


def _header(model):
	spec, encoder = model.spec, model.encoder
	return {
		"variant": spec.variant.value,
		"encoder": spec.encoder.value,
		"d_cat": spec.d_cat,
		"d_item": spec.d_item,
		"mlp_dims": ",".join(str(dim) for dim in spec.mlp_dims),
		"d_ta": spec.d_ta,
		"d_tr": spec.d_tr,
		"n_categories": model.n_categories,
		"n_items": model.n_items,
		"encoder_buckets": encoder.n_buckets,
		"bin_edges": _format_floats(encoder.bin_edges),
	}


def save_checkpoint(model, path):
	lines = [f"{MAGIC} {VERSION}"]
	lines.extend(f"{key} {value}".rstrip() for key, value in _header(model).items())
	blocks = [("table", name, table.weights) for name, table in model.tables.items()]
	blocks.extend(("param", name, array) for name, array in model.params.items())
	for kind, name, array in blocks:
		lines.append(f"{kind} {name} {array.shape[0]} {array.shape[1]}")
		lines.extend(_format_floats(row) for row in array)
	lines.append("end")

	with Path(path).open("w", encoding="utf-8", newline="\n") as f:
		f.write("\n".join(lines))
		f.write("\n")


class _Lines:
	def __init__(self, path):
		self.path = path
		self.lines = Path(path).read_text(encoding="utf-8").split("\n")
		self.position = 0

	def next(self):
		if self.position >= len(self.lines):
			raise ParseError(self.path, self.position, "unexpected end of checkpoint")
		self.position += 1
		return self.lines[self.position - 1]

	def fail(self, reason):
		raise ParseError(self.path, self.position, reason)


def _read_floats(lines, text, width):
	try:
		row = [float(value) for value in text.split()] if text else []
	except ValueError:
		lines.fail("non-numeric value")
	if len(row) != width:
		lines.fail(f"expected {width} values, got {len(row)}")
	return row


def load_checkpoint(path):
	"""Rebuild a model (with its fitted encoder) from `save_checkpoint` output.

	Raises
	------
	ParseError
		On a bad magic line, an unsupported version, malformed content or
		blocks that do not match the header's model.
	"""
	lines = _Lines(path)
	magic = lines.next().split()
	if len(magic) != 2 or magic[0] != MAGIC:
		lines.fail(f"not a {MAGIC} file")
	if magic[1] != str(VERSION):
		lines.fail(f"unsupported checkpoint version {magic[1]}")

	header = {}
	for key in ("variant", "encoder", "d_cat", "d_item", "mlp_dims", "d_ta", "d_tr",
				"n_categories", "n_items", "encoder_buckets", "bin_edges"):
		found, _, value = lines.next().partition(" ")
		if found != key:
			lines.fail(f"expected {key!r}, got {found!r}")
		header[key] = value

	try:
		spec = ModelSpec(
			variant=Variant(header["variant"]),
			encoder=EncoderKind(header["encoder"]),
			d_cat=int(header["d_cat"]),
			d_item=int(header["d_item"]),
			mlp_dims=tuple(int(dim) for dim in header["mlp_dims"].split(",")),
			d_ta=int(header["d_ta"]),
			d_tr=int(header["d_tr"]),
		)
		bin_edges = tuple(float(edge) for edge in header["bin_edges"].split())
		encoder = TemporalEncoder(spec.encoder, int(header["encoder_buckets"]), bin_edges)
		model = TinModel(spec, int(header["n_categories"]), int(header["n_items"]), encoder, initialize=False)
	except ValueError as e:
		lines.fail(str(e))

	expected = {(kind, name): shape for kind, name, shape in model.layout()}
	while True:
		fields = lines.next().split()
		if fields == ["end"]:
			break
		if len(fields) != 4 or fields[0] not in ("table", "param"):
			lines.fail(f"expected a table or param block, got {' '.join(fields)!r}")
		kind, name = fields[0], fields[1]
		try:
			n_rows, n_cols = int(fields[2]), int(fields[3])
		except ValueError:
			lines.fail(f"non-integer shape {fields[2]!r} x {fields[3]!r}")
		if expected.pop((kind, name), None) != (n_rows, n_cols):
			lines.fail(f"unexpected {kind} {name} with shape {n_rows} x {n_cols}")
		array = np.array([_read_floats(lines, lines.next(), n_cols) for _ in range(n_rows)]).reshape(n_rows, n_cols)
		if kind == "table":
			model._add_table(name, n_rows, n_cols, weights=array)
		else:
			model.params[name] = array

	if expected:
		lines.fail(f"missing blocks: {', '.join(name for _, name in expected)}")
	return model

"""Line-oriented sample records.

One sample per line:
	label<TAB>H<TAB>item:cat:ts,item:cat:ts,...<TAB>target_item:target_cat:target_ts<TAB>user_id
preceded by an optional `# key: value` header block. Records without the
trailing user column are accepted and get user id -1.
"""
from __future__ import annotations

from pathlib import Path

from .records import DatasetStats, Interaction, Sample
from ..errors import ParseError


def format_interaction(interaction):
	return f"{interaction.item_id}:{interaction.category_id}:{interaction.timestamp}"


def format_sample(sample):
	history = ",".join(format_interaction(behavior) for behavior in sample.history)
	return "\t".join((
		str(sample.label),
		str(len(sample.history)),
		history,
		format_interaction(sample.target),
		str(sample.user_id),
	))


def write_samples(samples, path, header=None):
	with Path(path).open("w", encoding="utf-8", newline="\n") as f:
		for key, value in (header or {}).items():
			f.write(f"# {key}: {value}\n")
		for sample in samples:
			f.write(format_sample(sample))
			f.write("\n")


def _parse_interaction(text, user_id, path, line_number):
	parts = text.split(":")
	if len(parts) != 3:
		raise ParseError(path, line_number, f"interaction {text!r} is not item:cat:ts")
	try:
		item_id, category_id, timestamp = (int(part) for part in parts)
	except ValueError:
		raise ParseError(path, line_number, f"interaction {text!r} has a non-integer field") from None
	return Interaction(user_id, item_id, category_id, timestamp)


def parse_sample(line, path, line_number):
	fields = line.rstrip("\r\n").split("\t")
	if len(fields) not in (4, 5):
		raise ParseError(path, line_number, f"expected 4 or 5 tab-separated fields, got {len(fields)}")
	try:
		label = int(fields[0])
		length = int(fields[1])
		user_id = int(fields[4]) if len(fields) == 5 else -1
	except ValueError:
		raise ParseError(path, line_number, "label, H and user id must be integers") from None
	if label not in (0, 1):
		raise ParseError(path, line_number, f"label must be 0 or 1, got {label}")

	history = tuple(
		_parse_interaction(text, user_id, path, line_number)
		for text in fields[2].split(",") if text
	)
	if len(history) != length:
		raise ParseError(path, line_number, f"H={length} but {len(history)} behaviors listed")
	target = _parse_interaction(fields[3], user_id, path, line_number)
	return Sample(history, target, label)


def read_samples(path):
	"""Read a sample file.

	Returns
	-------
	samples : list of Sample

	header : dict[str, str]
		The `# key: value` lines, values as strings.
	"""
	path = Path(path)
	samples, header = [], {}
	with path.open("r", encoding="utf-8") as f:
		for line_number, line in enumerate(f, start=1):
			if not line.strip():
				continue
			if line.startswith("#"):
				key, _, value = line[1:].partition(":")
				header[key.strip()] = value.strip()
				continue
			samples.append(parse_sample(line, path, line_number))
	return samples, header


def write_stats(stats, path):
	with Path(path).open("w", encoding="utf-8", newline="\n") as f:
		f.write("\n".join(stats.as_lines()))
		f.write("\n")


def read_stats(path):
	values = {}
	with Path(path).open("r", encoding="utf-8") as f:
		for line_number, line in enumerate(f, start=1):
			if not line.strip():
				continue
			key, _, value = line.rstrip("\r\n").partition("\t")
			try:
				values[key] = int(value)
			except ValueError:
				raise ParseError(path, line_number, f"{key} is not an integer") from None
	try:
		return DatasetStats(**values)
	except TypeError:
		raise ParseError(path, 1, f"stats keys {sorted(values)} do not match DatasetStats") from None

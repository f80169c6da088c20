from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .records import DatasetStats, IdDictionary, Interaction
from ..errors import ParseError


@dataclass
class InteractionLog:
	"""Interactions parsed from a review log plus the key dictionaries."""
	interactions: list = field(default_factory=list)
	users: IdDictionary = field(default_factory=IdDictionary)
	items: IdDictionary = field(default_factory=IdDictionary)
	categories: IdDictionary = field(default_factory=IdDictionary)

	def stats(self):
		return DatasetStats(
			n_users=len(self.users),
			n_items=len(self.items),
			n_categories=len(self.categories),
			n_samples=len(self.interactions),
		)

	def item_categories(self):
		"""Item id -> category id of its first occurrence."""
		mapping = {}
		for interaction in self.interactions:
			mapping.setdefault(interaction.item_id, interaction.category_id)
		return mapping


def parse_interaction_line(line, line_number, path, log):
	fields = line.rstrip("\r\n").split("\t")
	if len(fields) != 4:
		raise ParseError(path, line_number, f"expected 4 tab-separated fields, got {len(fields)}")
	user_key, item_key, category_key, timestamp = fields
	for name, key in (("user", user_key), ("item", item_key), ("category", category_key)):
		if not key.strip():
			raise ParseError(path, line_number, f"empty {name} key")
	try:
		timestamp = int(timestamp)
	except ValueError:
		raise ParseError(path, line_number, f"timestamp {timestamp!r} is not an integer") from None

	return Interaction(
		user_id=log.users.get_or_add(user_key),
		item_id=log.items.get_or_add(item_key),
		category_id=log.categories.get_or_add(category_key),
		timestamp=timestamp,
	)


def load_interactions(path):
	"""Read a `user<TAB>item<TAB>category<TAB>timestamp` review log.

	Keys are mapped to dense ids in first-seen order. Duplicate rows are
	kept; blank lines are skipped.

	Parameters
	----------
	path : str or pathlib.Path
		TSV file to read.

	Returns
	-------
	log : InteractionLog

	Raises
	------
	ParseError
		On the first malformed row, naming its 1-based line number.
	"""
	path = Path(path)
	log = InteractionLog()
	with path.open("r", encoding="utf-8") as f:
		for line_number, line in enumerate(f, start=1):
			if not line.strip():
				continue
			log.interactions.append(parse_interaction_line(line, line_number, path, log))
	return log


def write_id_dictionary(dictionary, path):
	with Path(path).open("w", encoding="utf-8", newline="\n") as f:
		for key, dense_id in dictionary.ids.items():
			f.write(f"{key}\t{dense_id}\n")


def read_id_dictionary(path):
	dictionary = IdDictionary()
	with Path(path).open("r", encoding="utf-8") as f:
		for line_number, line in enumerate(f, start=1):
			if not line.strip():
				continue
			fields = line.rstrip("\r\n").split("\t")
			if len(fields) != 2:
				raise ParseError(path, line_number, "expected key<TAB>id")
			try:
				dictionary.ids[fields[0]] = int(fields[1])
			except ValueError:
				raise ParseError(path, line_number, f"id {fields[1]!r} is not an integer") from None
	return dictionary

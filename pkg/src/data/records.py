from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Interaction:
	user_id: int
	item_id: int
	category_id: int
	timestamp: int


@dataclass(frozen=True)
class Sample:
	"""One labeled (history, target) instance.

	`history` is ordered oldest -> newest; `history[-1]` is the behavior at
	target-relative position 1.
	"""
	history: tuple
	target: Interaction
	label: int

	@property
	def user_id(self):
		return self.target.user_id

	@property
	def length(self):
		return len(self.history)


@dataclass(frozen=True)
class DatasetStats:
	n_users: int
	n_items: int
	n_categories: int
	n_samples: int

	def as_lines(self):
		return [f"{key}\t{value}" for key, value in self.__dict__.items()]


@dataclass
class IdDictionary:
	"""String key -> dense integer id, assigned in first-seen order."""
	ids: dict = field(default_factory=dict)

	def get_or_add(self, key):
		if key not in self.ids:
			self.ids[key] = len(self.ids)
		return self.ids[key]

	def __len__(self):
		return len(self.ids)


def validate_sample(sample, max_len=None):
	"""Return the list of invariant violations of `sample` (empty if valid)."""
	errors = []
	if sample.label not in (0, 1):
		errors.append(f"label must be 0 or 1, got {sample.label!r}")
	if not sample.history:
		errors.append("history is empty")
	if max_len is not None and len(sample.history) > max_len:
		errors.append(f"history length {len(sample.history)} exceeds max_len {max_len}")
	for behavior in sample.history:
		if behavior.timestamp > sample.target.timestamp:
			errors.append(f"behavior at {behavior.timestamp} is after target at {sample.target.timestamp}")
			break
	return errors


def dataset_stats(samples):
	users, items, categories = set(), set(), set()
	for sample in samples:
		users.add(sample.user_id)
		for interaction in (*sample.history, sample.target):
			items.add(interaction.item_id)
			categories.add(interaction.category_id)
	return DatasetStats(len(users), len(items), len(categories), len(samples))

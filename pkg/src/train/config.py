"""Trainer and model settings from `key = value` files."""
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..errors import ConfigError


@dataclass(frozen=True)
class TrainConfig:
	batch_size: int = 32
	epochs: int = 1
	seed: int = 0
	shuffle: bool = True
	eval_every: int = 0
	optimizer: str = "adam"
	learning_rate: float = 1e-3
	beta1: float = 0.9
	beta2: float = 0.999
	epsilon: float = 1e-8
	d_cat: int = 64
	d_item: int = 64
	mlp_dims: tuple = (80, 40)
	max_len: int = 100
	n_time_buckets: int = 10
	threads: int = 1

	def __post_init__(self):
		self.validate()


	def validate(self):
		checks = (
			(self.batch_size >= 1, f"batch_size must be >= 1, got {self.batch_size}"),
			(self.epochs >= 1, f"epochs must be >= 1, got {self.epochs}"),
			(self.learning_rate >= 0, f"learning_rate must be >= 0, got {self.learning_rate}"),
			(self.optimizer in ("adam", "adagrad"), f"optimizer must be adam or adagrad, got {self.optimizer!r}"),
			(0 <= self.beta1 < 1 and 0 <= self.beta2 < 1, "beta1 and beta2 must be in [0, 1)"),
			(self.epsilon > 0, f"epsilon must be > 0, got {self.epsilon}"),
			(self.eval_every >= 0, f"eval_every must be >= 0, got {self.eval_every}"),
			(self.d_cat >= 1 and self.d_item >= 1, "d_cat and d_item must be >= 1"),
			(all(dim >= 1 for dim in self.mlp_dims), f"mlp_dims must be >= 1, got {self.mlp_dims}"),
			(self.max_len >= 1, f"max_len must be >= 1, got {self.max_len}"),
			(self.n_time_buckets >= 2, f"n_time_buckets must be >= 2, got {self.n_time_buckets}"),
			(self.threads >= 1, f"threads must be >= 1, got {self.threads}"),
		)
		for ok, message in checks:
			if not ok:
				raise ConfigError(message)


	def with_overrides(self, **overrides):
		return replace(self, **{key: value for key, value in overrides.items() if value is not None})


	def as_dict(self):
		return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse_bool(text):
	lowered = text.lower()
	if lowered in ("true", "yes", "1"):
		return True
	if lowered in ("false", "no", "0"):
		return False
	raise ValueError(f"not a boolean: {text!r}")


def _parse_dims(text):
	return tuple(int(part) for part in text.split(",") if part.strip())


PARSERS = {int: int, float: float, bool: _parse_bool, str: str, tuple: _parse_dims}


def parse_config(text, source="<string>"):
	"""Parse config text into a TrainConfig.

	Blank lines and `#` comments are skipped. Unknown keys, duplicate keys
	and unparseable values raise ConfigError naming the line.
	"""
	types = {f.name: f.type for f in fields(TrainConfig)}
	values = {}
	for line_number, raw in enumerate(text.splitlines(), start=1):
		line = raw.split("#", 1)[0].strip()
		if not line:
			continue
		key, sep, value = (part.strip() for part in line.partition("="))
		if not sep or not key:
			raise ConfigError(f"{source}:{line_number}: expected 'key = value', got {raw.strip()!r}")
		if key not in types:
			raise ConfigError(f"{source}:{line_number}: unknown key {key!r}")
		if key in values:
			raise ConfigError(f"{source}:{line_number}: duplicate key {key!r}")
		try:
			values[key] = PARSERS[types[key]](value)
		except ValueError as e:
			raise ConfigError(f"{source}:{line_number}: bad value for {key}: {e}") from None
	return TrainConfig(**values)


def load_config(path):
	path = Path(path)
	if not path.is_file():
		raise ConfigError(f"config file not found: {path}")
	return parse_config(path.read_text(encoding="utf-8"), str(path))

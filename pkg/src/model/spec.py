from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..encoding import EncoderKind
from ..errors import InvalidSpecError


class Variant(Enum):
	"""Model family members keyed by their CLI name.

	Each member carries its component code (TI, TA, TR) and whether the
	target-aware product is taken per behavior inside the pooling
	(`product_in_pool`) or only once in the MLP head.
	"""
	def __new__(cls, cli_name, *args):
		obj = object.__new__(cls)
		obj._value_ = cli_name
		return obj

	def __init__(self, cli_name, tag, ti, ta, tr, product_in_pool):
		self.cli_name = cli_name
		self.tag = tag
		self.ti = ti
		self.ta = ta
		self.tr = tr
		self.product_in_pool = product_in_pool

	TIN = ("tin", "TIN", True, True, True, True)
	TIN_WO_TTE = ("tin-wo-tte", "TIN_woTTE", False, True, True, True)
	TIN_WO_TA = ("tin-wo-ta", "TIN_woTA", True, False, True, True)
	TIN_WO_TR = ("tin-wo-tr", "TIN_woTR", True, True, False, False)
	DIN = ("din", "DIN", False, True, True, False)
	DIN_PRIME = ("din-prime", "DIN_prime", False, True, False, False)
	AVG_CONCAT = ("avg-concat", "AVG_CONCAT", False, False, False, False)
	AVG_PRODUCT = ("avg-product", "AVG_PRODUCT", False, False, True, False)
	DIN_SPLIT = ("din-split", "DIN_SPLIT", False, True, True, False)

	@property
	def code(self):
		return "".join("1" if flag else "0" for flag in (self.ti, self.ta, self.tr))

	@classmethod
	def from_tag(cls, tag):
		for variant in cls:
			if variant.tag == tag:
				return variant
		raise InvalidSpecError(f"unknown variant tag {tag!r}")


LEARNED_CTC_VARIANTS = frozenset({
	Variant.TIN, Variant.TIN_WO_TTE, Variant.TIN_WO_TA, Variant.TIN_WO_TR, Variant.DIN,
})


@dataclass(frozen=True)
class ModelSpec:
	"""Architecture of one model.

	For DIN_SPLIT the attention and representation spaces have their own
	category/item tables of width `d_ta` and `d_tr` per feature, and
	`d_cat` / `d_item` are unused. `d_ta` = 0 disables attention.
	"""
	variant: Variant
	encoder: EncoderKind = EncoderKind.NONE
	d_cat: int = 64
	d_item: int = 64
	mlp_dims: tuple = (80, 40)
	d_ta: int = 0
	d_tr: int = 0

	def __post_init__(self):
		object.__setattr__(self, "variant", Variant(self.variant))
		object.__setattr__(self, "encoder", EncoderKind(self.encoder))
		object.__setattr__(self, "mlp_dims", tuple(int(dim) for dim in self.mlp_dims))
		self.validate()


	def validate(self):
		variant = self.variant
		if variant.ti and self.encoder is EncoderKind.NONE:
			raise InvalidSpecError(f"{variant.tag} needs a temporal encoder, got none")
		if not variant.ti and self.encoder is not EncoderKind.NONE:
			raise InvalidSpecError(f"{variant.tag} has no temporal component; encoder must be none")
		if any(dim < 1 for dim in self.mlp_dims):
			raise InvalidSpecError(f"mlp dims must be >= 1, got {self.mlp_dims}")

		if variant is Variant.DIN_SPLIT:
			if self.d_ta == 0 and self.d_tr == 0:
				raise InvalidSpecError("DIN_SPLIT needs d_ta or d_tr > 0, both are 0")
			if self.d_ta < 0 or self.d_tr < 1:
				raise InvalidSpecError(f"DIN_SPLIT needs d_ta >= 0 and d_tr >= 1, got {self.d_ta}, {self.d_tr}")
		elif self.d_cat < 1 or self.d_item < 1:
			raise InvalidSpecError(f"d_cat and d_item must be >= 1, got {self.d_cat}, {self.d_item}")


	@property
	def embedding_dim(self):
		"""d: width of e_i (and of the temporal embedding)."""
		if self.variant is Variant.DIN_SPLIT:
			return 2 * self.d_tr
		return self.d_cat + self.d_item


	@property
	def attention_dim(self):
		if self.variant is Variant.DIN_SPLIT:
			return 2 * self.d_ta
		return self.embedding_dim


	@property
	def head_input_dim(self):
		return (3 if self.variant.tr else 2) * self.embedding_dim


	@property
	def code(self):
		return self.variant.code

from __future__ import annotations

from sqlalchemy import CheckConstraint, Float, Integer, Text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, validates

from ..utils import is_non_empty_str


class Base(DeclarativeBase):
	@validates("variant", "code", "encoder")
	def validate_and_normalize_string(self, key, value):
		"""Reject blank strings; strip and lowercase the rest.

		Example:
			"  TIN-WO-TTE " -> "tin-wo-tte"
		"""
		if not is_non_empty_str(value):
			raise ValueError(f"{key} must be a non-empty string. Got {value!r} instead.")
		return value.strip().lower()


class Run(Base):
	"""One trained and evaluated repeat."""
	__tablename__ = "run"

	id: Mapped[int] = mapped_column(Integer, primary_key=True)
	variant: Mapped[str] = mapped_column(Text, nullable=False)
	code: Mapped[str] = mapped_column(Text, nullable=False)
	encoder: Mapped[str] = mapped_column(Text, nullable=False)
	seed: Mapped[int] = mapped_column(Integer, nullable=False)
	repeat: Mapped[int] = mapped_column(Integer, nullable=False)
	logloss: Mapped[float] = mapped_column(Float, nullable=False)
	gauc: Mapped[float] = mapped_column(Float, nullable=False)
	n_records: Mapped[int] = mapped_column(Integer, nullable=False)
	n_users: Mapped[int] = mapped_column(Integer, nullable=False)
	checkpoint: Mapped[str | None] = mapped_column(Text, nullable=True)

	__table_args__ = (
		CheckConstraint("length(trim(variant, ' \n\t\r\b\v\f')) > 0"),
		CheckConstraint("length(trim(encoder, ' \n\t\r\b\v\f')) > 0"),
		CheckConstraint("gauc >= 0 AND gauc <= 1"),
		CheckConstraint("logloss >= 0"),
		CheckConstraint("repeat >= 1"),
	)

	def as_dict(self):
		return {column.name: getattr(self, column.name) for column in self.__table__.columns}

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sqlalchemy import create_engine, select
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from .tables import Base, Run
from ..logger import TinLogger
from ..status import RunStatus


SUMMARY_HEADER = ("variant", "code", "encoder", "repeats", "logloss_mean", "logloss_std", "gauc_mean", "gauc_std")


@dataclass(frozen=True)
class RunSummary:
	variant: str
	code: str
	encoder: str
	repeats: int
	logloss_mean: float
	logloss_std: float
	gauc_mean: float
	gauc_std: float

	def as_row(self):
		return [
			self.variant, self.code, self.encoder, self.repeats,
			*(format(value, ".6f") for value in (self.logloss_mean, self.logloss_std, self.gauc_mean, self.gauc_std)),
		]


class RunRegistry:
	"""Ledger of trained repeats and their test metrics.

	Each `train` invocation records one row per repeat, so comparisons across
	variants can be assembled from separate runs.

	Notes
	-----
	  - This class is specific to SQLite.
	  - Standard deviations are population (ddof=0) over the recorded repeats.

	Parameters
	----------
	url : str
		SQLAlchemy database URL, e.g. "sqlite:///out/registry.sqlite".

	logger : TinLogger, default=None
		Logger to report through; a new one (optionally writing to
		`log_path`) is created if omitted.

	log_path : str, default=None
		Log file of the logger created when `logger` is None.

	echo : bool, default=False
		If True, the database engine will emit all SQL statements.

	test : bool, default=False
		If True, share one connection across threads (use with an in-memory `url`).
	"""
	def __init__(self, url, logger=None, log_path=None, echo=False, test=False):
		if test:
			self.engine = create_engine(
				url,
				echo=echo,
				connect_args={"check_same_thread": False},
				poolclass=StaticPool,
			)
		else:
			self.engine = create_engine(url, echo=echo)
		self._session = sessionmaker(bind=self.engine, autoflush=False, autocommit=False)
		self.logger = logger if logger is not None else TinLogger(name=f"src.registry.{self.__class__.__name__}", log_path=log_path)


	def session(self):
		return self._session()


	def create_database(self):
		"""Create the schema. Does nothing if it already exists.

		Returns
		-------
		status : RunStatus
			RunStatus.OK - schema present.
		"""
		Base.metadata.create_all(self.engine)
		self.logger.success(msg="registry ready", stacklevel=1, url=str(self.engine.url))
		return RunStatus.OK


	def record_run(self, variant, code, encoder, seed, repeat, logloss, gauc, n_records, n_users, checkpoint=None):
		"""Insert one repeat.

		Returns
		-------
		status : RunStatus
			Status of the operation:
				RunStatus.OK - run recorded.
				RunStatus.DATA_ERROR - a column value violates the schema.
				RunStatus.EXCEPTION - other errors.
		"""
		with self.session() as session:
			try:
				session.add(Run(
					variant=variant, code=code, encoder=encoder, seed=seed, repeat=repeat,
					logloss=float(logloss), gauc=float(gauc), n_records=n_records, n_users=n_users,
					checkpoint=None if checkpoint is None else str(checkpoint),
				))
				session.commit()
				self.logger.success(msg="run recorded", stacklevel=1, variant=variant, encoder=encoder, repeat=repeat)
				return RunStatus.OK
			except (IntegrityError, ValueError) as e:
				session.rollback()
				self.logger.data_error(f"run rejected: {e}", stacklevel=1, variant=variant, repeat=repeat)
				return RunStatus.DATA_ERROR
			except Exception as e:
				session.rollback()
				self.logger.exception(e, stacklevel=1, rollback=True)
				return RunStatus.EXCEPTION


	def get_runs(self, variant=None):
		"""Recorded runs as dicts in insertion order, optionally for one variant."""
		with self.session() as session:
			statement = select(Run).order_by(Run.id)
			if variant is not None:
				statement = statement.where(Run.variant == variant.strip().lower())
			return [run.as_dict() for run in session.scalars(statement)]


	def summarize(self):
		"""Mean and std of logloss and GAUC per (variant, encoder).

		Returns
		-------
		summaries : list of RunSummary
			Sorted by variant, then encoder.
		"""
		groups = {}
		for run in self.get_runs():
			groups.setdefault((run["variant"], run["encoder"]), []).append(run)

		summaries = []
		for (variant, encoder), runs in sorted(groups.items()):
			loglosses = np.array([run["logloss"] for run in runs])
			gaucs = np.array([run["gauc"] for run in runs])
			summaries.append(RunSummary(
				variant, runs[0]["code"], encoder, len(runs),
				float(loglosses.mean()), float(loglosses.std()), float(gaucs.mean()), float(gaucs.std()),
			))
		return summaries


	def close(self):
		self.engine.dispose()

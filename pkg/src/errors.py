from .status import RunStatus


class TinError(Exception):
	"""Base class of every error raised by this package.

	`status` is the `RunStatus` the CLI reports (and exits with) when the
	error reaches it.
	"""
	status = RunStatus.EXCEPTION


class DimensionError(TinError, ValueError):
	status = RunStatus.USAGE_ERROR


class EmptySequenceError(TinError, ValueError):
	status = RunStatus.DATA_ERROR


class IndexRangeError(TinError, IndexError):
	status = RunStatus.USAGE_ERROR


class IdLookupError(TinError, IndexError):
	status = RunStatus.DATA_ERROR


class ParseError(TinError, ValueError):
	status = RunStatus.USAGE_ERROR

	def __init__(self, path, line_number, reason):
		self.path = path
		self.line_number = line_number
		self.reason = reason
		super().__init__(f"{path}:{line_number}: {reason}")


class ConfigError(TinError, ValueError):
	status = RunStatus.USAGE_ERROR


class InvalidSpecError(TinError, ValueError):
	status = RunStatus.USAGE_ERROR


class UnsupportedVariantError(TinError, ValueError):
	status = RunStatus.USAGE_ERROR


class EmptyDatasetError(TinError, ValueError):
	status = RunStatus.DATA_ERROR


class BinningError(TinError, ValueError):
	status = RunStatus.DATA_ERROR


class EmptyGridError(TinError, ValueError):
	status = RunStatus.DATA_ERROR


class NumericError(TinError, ArithmeticError):
	status = RunStatus.NUMERIC_ERROR


class UndefinedMetricError(TinError, ValueError):
	status = RunStatus.DATA_ERROR


class MissingInputError(TinError, FileNotFoundError):
	status = RunStatus.USAGE_ERROR

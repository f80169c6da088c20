from enum import Enum


class RunStatus(Enum):
	def __new__(cls, *args, **kwds):
		value = len(cls.__members__) + 1
		obj = object.__new__(cls)
		obj._value_ = value
		return obj


	def __init__(self, exit_code, is_fatal):
		self.exit_code = exit_code
		self.is_fatal = is_fatal


	OK = (0, False)
	EXCEPTION = (1, True)
	USAGE_ERROR = (2, True)
	DATA_ERROR = (3, True)
	NUMERIC_ERROR = (4, True)

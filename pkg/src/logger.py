import logging
from logging.handlers import RotatingFileHandler
from .status import RunStatus
import json
import time


class JsonFormatter(logging.Formatter):
	converter = time.gmtime

	def __init__(self, include_time, include_level, include_logger, indent):
		super().__init__()
		self.include_time = include_time
		self.include_level = include_level
		self.include_logger = include_logger
		self.indent = indent


	def format(self, record):
		log_record = {}

		if self.include_level:
			log_record["level"] = record.levelname
		if self.include_logger:
			log_record["logger"] = record.name
		if self.include_time:
			log_record["time"] = self.formatTime(record, datefmt="UTC %Y-%m-%d %H:%M:%S")

		log_record["func"] = record.funcName
		log_record["msg"] = record.getMessage()

		if hasattr(record, "extra_data"):
			log_record.update(record.extra_data)

		return json.dumps(log_record, ensure_ascii=False, indent=self.indent, default=str)


class TinLogger:
	"""JSON-lines logger shared by the CLI, the trainer and the run registry.

	Parameters
	----------
	name : str
		Name of the underlying `logging.Logger`. Library modules log through
		children of "src", so attaching to "src" captures everything.

	log_path : str or None, default=None
		If given, events are also written to this file (rotated at 10 MB).
	"""
	def __init__(self, name, log_path=None):
		self.logger = logging.getLogger(name)
		self.logger.setLevel(logging.DEBUG)
		self.logger.propagate = False

		self.file_handler = None
		if log_path is not None:
			self.file_handler = RotatingFileHandler(
				log_path,
				maxBytes=10*1024*1024,
				backupCount=50,
				encoding="utf-8"
			)
			self.file_handler.setLevel(logging.DEBUG)
			self.file_handler.setFormatter(
				JsonFormatter(include_time=True, include_level=True, include_logger=True, indent=None)
			)

		self.stream_handler = logging.StreamHandler()
		self.stream_handler.setLevel(logging.INFO)
		self.stream_handler.setFormatter(
			JsonFormatter(include_time=False, include_level=True, include_logger=False, indent=None)
		)

		self.enable()


	def remove_handlers(self):
		handlers_to_remove = [handler for handler in self.logger.handlers]

		for handler in handlers_to_remove:
			self.logger.removeHandler(handler)


	def enable(self, stream=True):
		self.remove_handlers() # to prevent duplicate handlers

		if self.file_handler is not None:
			self.logger.addHandler(self.file_handler)
		if stream:
			self.logger.addHandler(self.stream_handler)


	def disable(self):
		self.remove_handlers()
		self.logger.addHandler(logging.NullHandler())


	def close(self):
		self.disable()
		if self.file_handler is not None:
			self.file_handler.close()


	def log_event(self, level, status, stacklevel, **kwargs):
		msg = kwargs.pop("msg", "")
		data = {
			"status": status.name,
		}
		if kwargs:
			data.update(kwargs)

		self.logger.log(
			level,
			msg,
			extra={"extra_data": data},
			stacklevel=stacklevel,
		)


	def success(self, msg, stacklevel, **kwargs):
		# stacklevel = 1, funcName is the direct caller of this function.
		# stacklevel = 2, funcName is the caller of the direct caller of this function.
		self.log_event(logging.INFO, RunStatus.OK, stacklevel+2, msg=msg, **kwargs)


	def warning(self, msg, stacklevel, **kwargs):
		self.log_event(logging.WARNING, RunStatus.OK, stacklevel+2, msg=msg, **kwargs)


	def exception(self, exception, stacklevel, **kwargs):
		status = getattr(exception, "status", RunStatus.EXCEPTION)
		self.log_event(
			logging.ERROR,
			status,
			error_type=type(exception).__name__,
			error_msg=str(exception),
			stacklevel=stacklevel+2,
			**kwargs
		)


	def data_error(self, what, stacklevel, **kwargs):
		self.log_event(
			logging.ERROR,
			RunStatus.DATA_ERROR,
			msg=f"{what}",
			stacklevel=stacklevel+2,
			**kwargs,
		)



	def numeric_failure(self, what, stacklevel, **kwargs):
		self.log_event(
			logging.ERROR,
			RunStatus.NUMERIC_ERROR,
			msg=f"{what}",
			stacklevel=stacklevel+2,
			**kwargs,
		)

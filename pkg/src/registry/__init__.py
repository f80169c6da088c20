from .tables import Base, Run
from .registry import RunRegistry, RunSummary, SUMMARY_HEADER

from .status import RunStatus
from .errors import (
	TinError, DimensionError, EmptySequenceError, IndexRangeError, IdLookupError, ParseError, ConfigError,
	InvalidSpecError, UnsupportedVariantError, EmptyDatasetError, BinningError, EmptyGridError, NumericError,
	UndefinedMetricError, MissingInputError,
)
from .logger import TinLogger
from .tensor import Tape, Gradients, grad_check
from .data import Interaction, Sample, synth_generate, build_leave_one_out, read_samples, write_samples
from .encoding import EmbeddingTable, EncoderKind, TemporalEncoder
from .model import Variant, ModelSpec, TinModel, save_checkpoint, load_checkpoint
from .metrics import EvalRecord, logloss, auc, gauc, gauc_by_length, evaluate
from .train import TrainConfig, OptimizerState, load_config, train
from .analysis import CorrelationGrid, ground_truth_ctc, learned_ctc, pearson_compare, export_grid, read_grid
from .registry import RunRegistry

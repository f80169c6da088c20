from .grid import CorrelationGrid, GridKind, export_grid, read_grid
from .pearson import (
	PearsonBin, PearsonReport, bin_of, pearson_coefficient, pearson_compare,
	bin_distribution, write_pearson_reports, write_bin_distribution,
)
from .ctc import (
	ground_truth_ctc, learned_ctc, mutual_information, position_categories,
	top_categories, top_target_categories, sequence_ctc, category_sweep, SequenceCtcRow,
)

from .utils import (
	_sample_n_random_samples, _sample_n_random_records, _small_model, _trainable,
	_brute_force_auc, _brute_force_mi, _history_with_intervals, _relu_margin, N_CATEGORIES, N_ITEMS, MAX_LEN, TTE_T_EDGES,
)

__all__ = [
	"_sample_n_random_samples",
	"_sample_n_random_records",
	"_small_model",
	"_trainable",
	"_brute_force_auc",
	"_brute_force_mi",
	"_history_with_intervals",
	"_relu_margin",
	"N_CATEGORIES",
	"N_ITEMS",
	"MAX_LEN",
	"TTE_T_EDGES",
]

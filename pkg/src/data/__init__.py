from .records import Interaction, Sample, DatasetStats, IdDictionary, dataset_stats, validate_sample
from .loader import InteractionLog, load_interactions, write_id_dictionary, read_id_dictionary
from .split import build_leave_one_out, group_by_user
from .synth import SynthParams, SyntheticDataset, synth_generate, split_synthetic, planted_logit
from .samples_io import write_samples, read_samples, write_stats, read_stats

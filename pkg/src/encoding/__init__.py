from .embedding import EmbeddingTable, semantic_embed, semantic_vector
from .temporal import (
	EncoderKind, TemporalEncoder, TARGET_BUCKET,
	tte_p, tte_t, coe, fit_tte_t_bins, bucketize_intervals, time_intervals, encode_behavior,
)

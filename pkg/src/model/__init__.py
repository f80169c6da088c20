from .spec import Variant, ModelSpec, LEARNED_CTC_VARIANTS
from .network import TinModel, TimOutput, LearnedTerms
from .checkpoint import save_checkpoint, load_checkpoint

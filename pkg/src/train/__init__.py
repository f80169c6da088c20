from .optim import OptimizerState, adam_step, adagrad_step
from .config import TrainConfig, load_config, parse_config
from .trainer import TrainResult, train, batch_gradients, write_loss_curve

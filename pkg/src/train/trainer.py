from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .optim import OptimizerState
from ..errors import EmptyDatasetError, NumericError
from ..metrics import evaluate
from ..tensor import Gradients


logger = logging.getLogger(__name__)


@dataclass
class TrainResult:
	model: object
	losses: list = field(default_factory=list)
	evaluations: list = field(default_factory=list)
	optimizer: OptimizerState | None = None


def sample_gradients(model, samples):
	"""Summed loss and gradients of `samples`, merged in order."""
	total, gradients = 0.0, Gradients()
	for sample in samples:
		loss, sample_grads = model.loss_and_gradients(sample)
		total += loss
		gradients.merge(sample_grads)
	return total, gradients


def batch_gradients(model, batch, executor=None, threads=1):
	"""Mean loss and mean gradients over `batch`.

	With an executor the batch is cut into `threads` contiguous chunks whose
	partial sums are reduced in chunk order, so results depend only on the
	thread count.
	"""
	if executor is None or threads == 1 or len(batch) < 2:
		loss_sum, gradients = sample_gradients(model, batch)
	else:
		chunks = [chunk for chunk in np.array_split(np.arange(len(batch)), threads) if chunk.size]
		futures = [executor.submit(sample_gradients, model, [batch[i] for i in chunk]) for chunk in chunks]
		loss_sum, gradients = 0.0, Gradients()
		for future in futures:
			partial_loss, partial_grads = future.result()
			loss_sum += partial_loss
			gradients.merge(partial_grads)
	return loss_sum / len(batch), gradients.scale(1.0 / len(batch))


def _all_finite(gradients):
	if not all(np.all(np.isfinite(grad)) for grad in gradients.dense.values()):
		return False
	return all(np.all(np.isfinite(grad)) for rows in gradients.rows.values() for grad in rows.values())


def train(model, samples, config, eval_samples=None, optimizer=None):
	"""Mini-batch training of `model` in place.

	Parameters
	----------
	model : TinModel

	samples : list of Sample
		Training set; must be non-empty.

	config : TrainConfig
		Batch size, epochs, seed, shuffle, optimizer settings, threads.

	eval_samples : list of Sample, default=None
		Evaluated every `config.eval_every` batches when both are set.

	optimizer : OptimizerState, default=None
		Resumes from existing slots; a fresh state is built from `config`
		otherwise.

	Returns
	-------
	result : TrainResult
		The model, per-batch mean losses, periodic evaluations and the
		optimizer state.

	Raises
	------
	NumericError
		On a non-finite loss or gradient, naming the epoch and batch.
	"""
	if not samples:
		raise EmptyDatasetError("training set is empty")
	optimizer = optimizer if optimizer is not None else OptimizerState.from_config(config)
	rng = np.random.default_rng(config.seed)
	result = TrainResult(model, optimizer=optimizer)
	n_samples = len(samples)

	pool = ThreadPoolExecutor(max_workers=config.threads) if config.threads > 1 else nullcontext()
	with pool as executor:
		for epoch in range(1, config.epochs + 1):
			order = rng.permutation(n_samples) if config.shuffle else np.arange(n_samples)
			epoch_losses = []
			for batch_index, start in enumerate(range(0, n_samples, config.batch_size), start=1):
				batch = [samples[i] for i in order[start:start + config.batch_size]]
				where = f"epoch {epoch}, batch {batch_index} (step {optimizer.t + 1})"
				try:
					loss, gradients = batch_gradients(model, batch, executor, config.threads)
				except NumericError as e:
					raise NumericError(f"{e} at {where}") from e
				if not np.isfinite(loss) or not _all_finite(gradients):
					raise NumericError(f"non-finite loss {loss} at {where}")

				optimizer.apply(model, gradients)
				result.losses.append(loss)
				epoch_losses.append(loss)

				if config.eval_every and eval_samples and optimizer.t % config.eval_every == 0:
					report = evaluate(model, eval_samples)
					result.evaluations.append((optimizer.t, report))
					logger.info(
						"evaluation",
						extra={"extra_data": {"step": optimizer.t, "logloss": report.logloss, "gauc": report.gauc}},
					)

			logger.info(
				"epoch done",
				extra={"extra_data": {"epoch": epoch, "batches": len(epoch_losses), "mean_loss": float(np.mean(epoch_losses))}},
			)
	return result


def write_loss_curve(losses, path):
	with Path(path).open("w", encoding="utf-8", newline="") as f:
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(["step", "loss"])
		for step, loss in enumerate(losses, start=1):
			writer.writerow([step, format(loss, ".17g")])

from src.data import synth_generate
from src.encoding import EncoderKind, TemporalEncoder
from src.model import ModelSpec, TinModel, Variant
from src.tensor import Tape, ops
from src.train import TrainConfig, batch_gradients, train
from concurrent.futures import ThreadPoolExecutor
import time
import numpy as np


N_CATEGORIES = 20
H_MAX = 50


def convert_to_ms(durations):
	return [d * 1000 for d in durations]


def get_stats(durations):
	return {
		"avg": sum(durations) / len(durations),
		"p50": np.percentile(durations, 50),
		"p95": np.percentile(durations, 95),
		"p99": np.percentile(durations, 99)
	}


def format_stats(stats):
	return f"avg: {stats['avg']:.3f}, p50: {stats['p50']:.3f}, p95: {stats['p95']:.3f}, p99: {stats['p99']:.3f}"


def build_model(variant, samples, n_items, d=64, mlp_dims=(80, 40), seed=2):
	encoder_kind = EncoderKind.TTE_P if variant.ti else EncoderKind.NONE
	spec = ModelSpec(variant, encoder_kind, d, d, mlp_dims, d_ta=d, d_tr=d)
	encoder = TemporalEncoder.create(encoder_kind, max_len=H_MAX, train_samples=samples) if variant.ti else None
	return TinModel(spec, N_CATEGORIES, n_items, encoder, seed=seed)


def benchmark_forward(model, samples):
	durations = []
	for sample in samples:
		start = time.perf_counter()
		model.predict(sample)
		durations.append(time.perf_counter() - start)
	return convert_to_ms(durations)


def benchmark_forward_backward(model, samples):
	durations = []
	for sample in samples:
		start = time.perf_counter()
		tape = Tape()
		logit = model.logit_node(tape, sample)
		_, grad_logit = ops.sigmoid_xent(logit.item(), sample.label)
		tape.backward(ops.sum_all(ops.hadamard(logit, tape.constant([[grad_logit]]))))
		durations.append(time.perf_counter() - start)
	return convert_to_ms(durations)


def benchmark_batch_gradients(model, samples, batch_size, threads):
	batches = [samples[i:i + batch_size] for i in range(0, len(samples) - batch_size + 1, batch_size)]
	durations = []
	with ThreadPoolExecutor(max_workers=threads) as executor:
		for batch in batches:
			start = time.perf_counter()
			batch_gradients(model, batch, executor=executor, threads=threads)
			durations.append(time.perf_counter() - start)
	return convert_to_ms(durations)


def benchmark_variants(samples, n_items, variants=tuple(Variant)):
	print("-----Per-sample latency-----\nMeasure in ms")
	for variant in variants:
		model = build_model(variant, samples, n_items)
		# warm up
		benchmark_forward(model, samples[:20])

		forward = get_stats(benchmark_forward(model, samples))
		backward = get_stats(benchmark_forward_backward(model, samples))
		print(f"{variant.tag:<12} forward     {format_stats(forward)}")
		print(f"{variant.tag:<12} fwd + bwd   {format_stats(backward)}")


def benchmark_threads(samples, n_items, batch_size=128, thread_counts=(1, 2, 4, 8)):
	print(f"-----Batch gradients, TIN, batch {batch_size}-----\nMeasure in ms")
	model = build_model(Variant.TIN, samples, n_items)
	for threads in thread_counts:
		stats = get_stats(benchmark_batch_gradients(model, samples, batch_size, threads))
		print(f"threads: {threads}, {format_stats(stats)}")


if __name__ == "__main__":
	n_users = 500

	dataset = synth_generate(n_users, N_CATEGORIES, H_MAX, 0.7, 3.0, -1.0, seed=2, min_len=H_MAX // 2)
	samples = dataset.samples
	print(f"samples: {len(samples)}, history length {H_MAX // 2}-{H_MAX}\n{'-' * 30}")

	benchmark_variants(samples, dataset.n_items)

	# ----------------------------
	# benchmark_threads(samples, dataset.n_items)

	# ----------------------------
	# config = TrainConfig(batch_size=128, epochs=1, threads=4)
	# start = time.perf_counter()
	# train(build_model(Variant.TIN, samples, dataset.n_items), samples, config)
	# print(f"One epoch over {len(samples)} samples took {time.perf_counter() - start:.2f}s")

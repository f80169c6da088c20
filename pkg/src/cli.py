"""Command-line pipeline: synth, prepare, train, eval, analyze, report.

Every subcommand writes its outputs under `--out` together with a
`manifest` (JSON) holding the resolved arguments and content hashes of
inputs and outputs. Exit codes come from `RunStatus`.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (
	bin_distribution, category_sweep, export_grid, ground_truth_ctc, learned_ctc, pearson_compare,
	sequence_ctc, top_categories, top_target_categories, write_bin_distribution, write_pearson_reports,
)
from .analysis.ctc import restrict
from .data import (
	DatasetStats, build_leave_one_out, load_interactions, read_samples, read_stats, split_synthetic,
	synth_generate, write_id_dictionary, write_samples, write_stats,
)
from .encoding import EncoderKind, TemporalEncoder
from .errors import ConfigError, InvalidSpecError, MissingInputError, NumericError, TinError
from .logger import TinLogger
from .metrics import (
	LENGTH_EDGES, REPORT_HEADER, eval_records, evaluate, gauc_by_length, summarize_records, write_report,
)
from .model import ModelSpec, TinModel, Variant, load_checkpoint, save_checkpoint
from .registry import SUMMARY_HEADER, RunRegistry
from .status import RunStatus
from .train import TrainConfig, load_config, train, write_loss_curve
from .utils import file_hash, tree_hash


MANIFEST_NAME = "manifest"
TRAIN_METRICS_HEADER = (*REPORT_HEADER, "logloss_std", "gauc_std")


@dataclass
class RunManifest:
	subcommand: str
	arguments: dict
	seed: int | None = None
	config: dict = field(default_factory=dict)
	inputs: list = field(default_factory=list)
	outputs: list = field(default_factory=list)

	def write(self, out_dir):
		"""Write `out_dir/manifest`; hashes are computed at write time."""
		data = asdict(self)
		data["inputs"] = [str(path) for path in self.inputs]
		data["outputs"] = [Path(path).name for path in self.outputs]
		data["input_hash"] = tree_hash(self.inputs) if self.inputs else ""
		data["output_hashes"] = {Path(path).name: file_hash(path) for path in self.outputs}
		path = Path(out_dir) / MANIFEST_NAME
		path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
		return path


def _arguments(args):
	return {key: value for key, value in sorted(vars(args).items()) if key not in ("handler", "log_file", "quiet")}


def require_file(path):
	path = Path(path)
	if not path.is_file():
		raise MissingInputError(f"input file not found: {path}")
	return path


def require_dir(path):
	path = Path(path)
	if not path.is_dir():
		raise MissingInputError(f"input directory not found: {path}")
	return path


def output_dir(path):
	path = Path(path)
	path.mkdir(parents=True, exist_ok=True)
	return path


@contextmanager
def open_output(path):
	if path is None:
		yield sys.stdout
	else:
		with Path(path).open("w", encoding="utf-8", newline="") as f:
			yield f


@dataclass
class DatasetDir:
	"""train.tsv / test.tsv / stats.tsv as written by `synth` and `prepare`."""
	path: Path
	train: list
	test: list
	header: dict
	stats: DatasetStats

	def _id_space(self, attribute):
		samples = self.train + self.test
		seen = max((getattr(x, attribute) for s in samples for x in (*s.history, s.target)), default=-1)
		return seen + 1

	@property
	def n_items(self):
		return max(self.stats.n_items, self._id_space("item_id"))

	@property
	def n_categories(self):
		return max(self.stats.n_categories, self._id_space("category_id"))


def load_dataset_dir(path):
	path = require_dir(path)
	train_samples, header = read_samples(require_file(path / "train.tsv"))
	test_samples, _ = read_samples(require_file(path / "test.tsv"))
	return DatasetDir(path, train_samples, test_samples, header, read_stats(require_file(path / "stats.tsv")))


def resolve_variant(variant_name, encoder_name, log):
	"""Reconcile the requested variant with the requested encoder.

	With no encoder given, TI variants use tte-p and the others none. An
	explicit `none` turns `tin` into `tin-wo-tte` (with a warning) and is an
	error for the other TI variants; variants without TI ignore an explicit
	encoder with a warning.
	"""
	variant = Variant(variant_name)
	if encoder_name is None:
		return variant, EncoderKind.TTE_P if variant.ti else EncoderKind.NONE
	encoder = EncoderKind(encoder_name)
	if variant.ti and encoder is EncoderKind.NONE:
		if variant is Variant.TIN:
			log.warning("tin with encoder none is tin-wo-tte; remapping", stacklevel=1)
			return Variant.TIN_WO_TTE, EncoderKind.NONE
		raise InvalidSpecError(f"{variant.value} needs a temporal encoder (tte-p, tte-t or coe)")
	if not variant.ti and encoder is not EncoderKind.NONE:
		log.warning(f"{variant.value} has no temporal component; ignoring encoder {encoder.value}", stacklevel=1)
		encoder = EncoderKind.NONE
	return variant, encoder


def check_variant(model, variant_name):
	if variant_name is not None and Variant(variant_name) is not model.spec.variant:
		raise InvalidSpecError(f"checkpoint holds {model.spec.variant.value}, not {variant_name}")


def cmd_synth(args, log):
	try:
		dataset = synth_generate(
			args.users, args.categories, args.h_max, args.decay, args.match_boost, args.base_logit, args.seed,
			args.items_per_category, args.min_len, args.targets_per_user,
		)
		train_samples, test_samples = split_synthetic(dataset.samples, args.test_fraction)
	except ValueError as e:
		raise ConfigError(str(e)) from e

	out = output_dir(args.out)
	header = dataset.params.header()
	stats = DatasetStats(args.users, dataset.n_items, args.categories, len(dataset.samples))
	outputs = [out / "train.tsv", out / "test.tsv", out / "stats.tsv"]
	write_samples(train_samples, outputs[0], header)
	write_samples(test_samples, outputs[1], header)
	write_stats(stats, outputs[2])
	RunManifest("synth", _arguments(args), args.seed, outputs=outputs).write(out)
	log.success("synthetic dataset written", stacklevel=1, out=str(out), train=len(train_samples), test=len(test_samples))


def cmd_prepare(args, log):
	source = require_file(args.input)
	interactions = load_interactions(source)
	train_samples, test_samples = build_leave_one_out(
		interactions.interactions, args.max_len, args.seed, args.min_user_len, args.neg,
		interactions.item_categories(), len(interactions.items),
	)

	out = output_dir(args.out)
	stats = DatasetStats(
		n_users=len({sample.user_id for sample in test_samples}),
		n_items=len(interactions.items),
		n_categories=len(interactions.categories),
		n_samples=len(train_samples) + len(test_samples),
	)
	outputs = [out / name for name in ("train.tsv", "test.tsv", "users.tsv", "items.tsv", "categories.tsv", "stats.tsv")]
	write_samples(train_samples, outputs[0])
	write_samples(test_samples, outputs[1])
	write_id_dictionary(interactions.users, outputs[2])
	write_id_dictionary(interactions.items, outputs[3])
	write_id_dictionary(interactions.categories, outputs[4])
	write_stats(stats, outputs[5])
	RunManifest("prepare", _arguments(args), args.seed, inputs=[source], outputs=outputs).write(out)
	log.success("dataset prepared", stacklevel=1, out=str(out), **asdict(stats))


def _train_config(args):
	config = load_config(args.config) if args.config else TrainConfig()
	return config.with_overrides(
		seed=args.seed, threads=args.threads, epochs=args.epochs,
		batch_size=args.batch_size, learning_rate=args.lr,
	)


def _summary_row(variant, code, reports):
	loglosses = np.array([report.logloss for report in reports])
	gaucs = np.array([report.gauc for report in reports])
	return [
		f"{variant.tag}:summary", code,
		format(loglosses.mean(), ".6f"), format(gaucs.mean(), ".6f"),
		sum(report.n_records for report in reports) // len(reports),
		sum(report.n_users for report in reports) // len(reports),
		format(loglosses.std(), ".6f"), format(gaucs.std(), ".6f"),
	]


def cmd_train(args, log):
	if args.repeats < 1:
		raise ConfigError(f"--repeats must be >= 1, got {args.repeats}")
	config = _train_config(args)
	data = load_dataset_dir(args.data)
	variant, encoder_kind = resolve_variant(args.variant, args.encoder, log)
	spec = ModelSpec(
		variant, encoder_kind, config.d_cat, config.d_item, config.mlp_dims,
		d_ta=config.d_cat if args.d_ta is None else args.d_ta,
		d_tr=config.d_item if args.d_tr is None else args.d_tr,
	)
	encoder = None
	if variant.ti:
		encoder = TemporalEncoder.create(encoder_kind, config.max_len, config.n_time_buckets, data.train)

	out = output_dir(args.out)
	registry = RunRegistry(args.registry or f"sqlite:///{(out / 'registry.sqlite').as_posix()}", logger=log)
	registry.create_database()

	reports, outputs = [], []
	try:
		for repeat in range(1, args.repeats + 1):
			repeat_config = config.with_overrides(seed=config.seed + repeat - 1)
			model = TinModel(spec, data.n_categories, data.n_items, encoder, seed=repeat_config.seed)
			result = train(model, data.train, repeat_config)
			report = evaluate(model, data.test, name=f"{variant.tag}#{repeat}")
			reports.append(report)

			checkpoint = out / f"checkpoint_{repeat}.txt"
			loss_curve = out / f"loss_{repeat}.csv"
			save_checkpoint(model, checkpoint)
			write_loss_curve(result.losses, loss_curve)
			outputs.extend([checkpoint, loss_curve])
			registry.record_run(
				variant.value, spec.code, encoder_kind.value, repeat_config.seed, repeat,
				report.logloss, report.gauc, report.n_records, report.n_users, checkpoint,
			)
			log.success(
				"repeat trained", stacklevel=1,
				variant=variant.value, encoder=encoder_kind.value, repeat=repeat, logloss=report.logloss, gauc=report.gauc,
			)
	finally:
		registry.close()

	metrics_path = out / "metrics.csv"
	with open_output(metrics_path) as f:
		rows = [[*report.as_row(), "", ""] for report in reports]
		write_report(f, [], TRAIN_METRICS_HEADER, [*rows, _summary_row(variant, spec.code, reports)])
	outputs.append(metrics_path)
	RunManifest(
		"train", _arguments(args), config.seed, config.as_dict(), inputs=[data.path], outputs=outputs,
	).write(out)


def cmd_eval(args, log):
	model = load_checkpoint(require_file(args.ckpt))
	check_variant(model, args.variant)
	data = load_dataset_dir(args.data)
	records = eval_records(model, data.test)
	report = summarize_records(records, model.spec.variant.tag, model.spec.code)

	with open_output(args.out) as f:
		write_report(f, [report])
	if args.by_length:
		rows = gauc_by_length(records, [sample.length for sample in data.test], LENGTH_EDGES)
		by_length = None if args.out is None else Path(args.out).with_name(Path(args.out).stem + "_by_length.csv")
		with open_output(by_length) as f:
			writer = csv.writer(f, lineterminator="\n")
			writer.writerow(["length", "gauc", "n_records"])
			writer.writerows([label, "" if value is None else format(value, ".6f"), n] for label, value, n in rows)

	if args.out is not None:
		outputs = [Path(args.out)] + ([by_length] if args.by_length else [])
		RunManifest("eval", _arguments(args), inputs=[Path(args.ckpt), data.path], outputs=outputs).write(Path(args.out).parent)
	log.success("evaluated", stacklevel=1, logloss=report.logloss, gauc=report.gauc, n_records=report.n_records)


def cmd_analyze(args, log):
	model = load_checkpoint(require_file(args.ckpt))
	check_variant(model, args.variant)
	data = load_dataset_dir(args.data)
	samples = data.train if args.split == "train" else data.test
	target = args.target_cat

	rows = top_categories(samples, args.top_k, target)
	if target not in rows:
		rows = [*rows[:max(args.top_k - 1, 0)], target]
	truth = ground_truth_ctc(samples, target, rows, args.positions)
	learned = learned_ctc(model, samples, target, rows, args.positions, args.aggregate, args.threads)

	out = output_dir(args.out)
	outputs = [out / name for name in ("ground_truth.csv", "learned.csv", "pearson.csv", "bins.csv")]
	export_grid(truth, outputs[0])
	export_grid(learned, outputs[1])

	if args.sweep > 0:
		reports, distribution = category_sweep(
			model, samples, top_target_categories(samples, args.sweep), args.positions, args.aggregate, args.threads,
		)
	else:
		reports = [pearson_compare(truth, learned)]
		distribution = bin_distribution(reports)
	write_pearson_reports(reports, outputs[2])
	write_bin_distribution(distribution, outputs[3])

	if args.sequences > 0:
		sequences_path = out / "sequences.csv"
		with open_output(sequences_path) as f:
			writer = csv.writer(f, lineterminator="\n")
			writer.writerow(["sample", "position", "category", "ground_truth", "learned"])
			for index, sample in enumerate(restrict(samples, target)[:args.sequences]):
				for row in sequence_ctc(model, sample, truth, args.positions):
					truth_value = "" if row.ground_truth is None else format(row.ground_truth, ".17g")
					writer.writerow([index, row.position, row.category, truth_value, format(row.learned, ".17g")])
		outputs.append(sequences_path)

	RunManifest("analyze", _arguments(args), inputs=[Path(args.ckpt), data.path], outputs=outputs).write(out)
	log.success("analysis written", stacklevel=1, out=str(out), target_category=target, reports=len(reports))


def cmd_report(args, log):
	registry = RunRegistry(args.registry, logger=log)
	registry.create_database()
	try:
		summaries = registry.summarize()
	finally:
		registry.close()
	with open_output(args.out) as f:
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(SUMMARY_HEADER)
		writer.writerows(summary.as_row() for summary in summaries)
	log.success("report written", stacklevel=1, groups=len(summaries))


def build_parser():
	parser = argparse.ArgumentParser(prog="tin", description="Temporal interest network pipeline.")
	parser.add_argument("--log-file", default=None, help="Also write JSON-lines logs to this file")
	parser.add_argument("--quiet", action="store_true", help="Do not log to stderr")
	subparsers = parser.add_subparsers(dest="command", required=True)

	synth = subparsers.add_parser("synth", help="Write a planted-pattern train/test dataset")
	synth.add_argument("--out", required=True)
	synth.add_argument("--users", type=int, default=2000)
	synth.add_argument("--categories", type=int, default=20)
	synth.add_argument("--h-max", type=int, default=20)
	synth.add_argument("--decay", type=float, default=0.7)
	synth.add_argument("--match-boost", type=float, default=3.0)
	synth.add_argument("--base-logit", type=float, default=-1.0)
	synth.add_argument("--items-per-category", type=int, default=10)
	synth.add_argument("--min-len", type=int, default=None)
	synth.add_argument("--targets-per-user", type=int, default=4)
	synth.add_argument("--test-fraction", type=float, default=0.2)
	synth.add_argument("--seed", type=int, default=0)
	synth.set_defaults(handler=cmd_synth)

	prepare = subparsers.add_parser("prepare", help="Leave-one-out samples from a review log")
	prepare.add_argument("--input", required=True)
	prepare.add_argument("--out", required=True)
	prepare.add_argument("--min-user-len", type=int, default=5)
	prepare.add_argument("--max-len", type=int, default=100)
	prepare.add_argument("--neg", type=int, default=1)
	prepare.add_argument("--seed", type=int, default=0)
	prepare.set_defaults(handler=cmd_prepare)

	train_parser = subparsers.add_parser("train", help="Train seeded repeats of one variant")
	train_parser.add_argument("--data", required=True)
	train_parser.add_argument("--variant", required=True, choices=[variant.value for variant in Variant])
	train_parser.add_argument(
		"--encoder", default=None, choices=[kind.value for kind in EncoderKind],
		help="Temporal encoder; defaults to tte-p for TI variants and none otherwise",
	)
	train_parser.add_argument("--config", default=None)
	train_parser.add_argument("--out", required=True)
	train_parser.add_argument("--repeats", type=int, default=1)
	train_parser.add_argument("--seed", type=int, default=None)
	train_parser.add_argument("--threads", type=int, default=None)
	train_parser.add_argument("--epochs", type=int, default=None)
	train_parser.add_argument("--batch-size", type=int, default=None)
	train_parser.add_argument("--lr", type=float, default=None)
	train_parser.add_argument("--d-ta", type=int, default=None)
	train_parser.add_argument("--d-tr", type=int, default=None)
	train_parser.add_argument("--registry", default=None, help="Run registry URL (default: <out>/registry.sqlite)")
	train_parser.set_defaults(handler=cmd_train)

	eval_parser = subparsers.add_parser("eval", help="Logloss / GAUC of a checkpoint on test.tsv")
	eval_parser.add_argument("--ckpt", required=True)
	eval_parser.add_argument("--data", required=True)
	eval_parser.add_argument("--variant", default=None, choices=[variant.value for variant in Variant])
	eval_parser.add_argument("--out", default=None, help="Report CSV path (default: stdout)")
	eval_parser.add_argument("--by-length", action="store_true")
	eval_parser.set_defaults(handler=cmd_eval)

	analyze = subparsers.add_parser("analyze", help="Ground-truth and learned correlation grids")
	analyze.add_argument("--ckpt", required=True)
	analyze.add_argument("--data", required=True)
	analyze.add_argument("--target-cat", type=int, required=True)
	analyze.add_argument("--top-k", type=int, default=5)
	analyze.add_argument("--positions", type=int, default=10)
	analyze.add_argument("--out", required=True)
	analyze.add_argument("--variant", default=None, choices=[variant.value for variant in Variant])
	analyze.add_argument("--split", default="train", choices=["train", "test"])
	analyze.add_argument("--aggregate", default="mean", choices=["mean", "median"])
	analyze.add_argument("--sweep", type=int, default=0, help="Pearson study over the N most frequent target categories")
	analyze.add_argument("--sequences", type=int, default=0, help="Per-sequence view of the first N restricted samples")
	analyze.add_argument("--threads", type=int, default=1)
	analyze.set_defaults(handler=cmd_analyze)

	report = subparsers.add_parser("report", help="Mean/std of recorded runs per variant")
	report.add_argument("--registry", required=True)
	report.add_argument("--out", default=None)
	report.set_defaults(handler=cmd_report)
	return parser


def main(argv=None):
	"""Run one subcommand and return its exit code."""
	args = build_parser().parse_args(argv)
	log = TinLogger("src", log_path=args.log_file)
	if args.quiet:
		if args.log_file:
			log.enable(stream=False)
		else:
			log.disable()

	try:
		args.handler(args, log)
		return RunStatus.OK.exit_code
	except NumericError as e:
		log.numeric_failure(e, stacklevel=1, subcommand=args.command)
		return e.status.exit_code
	except TinError as e:
		log.exception(e, stacklevel=1, subcommand=args.command)
		return e.status.exit_code
	except Exception as e:
		log.exception(e, stacklevel=1, subcommand=args.command)
		return RunStatus.EXCEPTION.exit_code
	finally:
		log.close()

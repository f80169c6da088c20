import csv
import json

import pytest

from src import NumericError, cli
from src.analysis import GridKind, read_grid
from src.cli import main, resolve_variant
from src.encoding import EncoderKind
from src.logger import TinLogger
from src.model import Variant, load_checkpoint
from src.registry import RunRegistry


CONFIG = """
batch_size = 16
epochs = 1
learning_rate = 0.01
d_cat = 4
d_item = 4
mlp_dims = 8
max_len = 8
"""


def _run(*argv):
	return main(["--quiet", *map(str, argv)])


def _rows(path):
	with open(path, encoding="utf-8", newline="") as f:
		return list(csv.reader(f))


def _manifest(directory):
	return json.loads((directory / "manifest").read_text(encoding="utf-8"))


def _rows_tsv(path):
	return [line.split("\t") for line in path.read_text(encoding="utf-8").splitlines() if line]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
	root = tmp_path_factory.mktemp("cli")
	(root / "train.conf").write_text(CONFIG, encoding="utf-8")
	status = _run("synth", "--out", root / "data", "--users", 60, "--categories", 4, "--h-max", 8, "--seed", 1)
	assert status == 0
	return root


@pytest.fixture(scope="module")
def trained(workspace):
	out = workspace / "tin"
	status = _run(
		"train", "--data", workspace / "data", "--variant", "tin", "--encoder", "tte-p",
		"--config", workspace / "train.conf", "--out", out, "--repeats", 2,
	)
	assert status == 0
	return out


def test_synth_outputs(workspace):
	manifest = _manifest(workspace / "data")
	assert manifest["subcommand"] == "synth"
	assert sorted(manifest["output_hashes"]) == ["stats.tsv", "test.tsv", "train.tsv"]
	header = (workspace / "data" / "train.tsv").read_text(encoding="utf-8").splitlines()[0]
	assert header.startswith("# ")


def test_synth_bad_parameters(tmp_path):
	assert _run("synth", "--out", tmp_path, "--users", 0) == 2
	assert _run("synth", "--out", tmp_path, "--decay", 1.5) == 2


def test_prepare(tmp_path, interactions_path):
	assert _run("prepare", "--input", interactions_path, "--out", tmp_path / "a", "--seed", 3) == 0
	stats = dict(_rows_tsv(tmp_path / "a" / "stats.tsv"))
	assert stats["n_users"] == "50"
	assert _run("prepare", "--input", interactions_path, "--out", tmp_path / "b", "--seed", 3) == 0
	assert _manifest(tmp_path / "a")["output_hashes"] == _manifest(tmp_path / "b")["output_hashes"]
	assert _manifest(tmp_path / "a")["input_hash"]


def test_prepare_missing_input(tmp_path):
	assert _run("prepare", "--input", tmp_path / "missing.tsv", "--out", tmp_path / "out") == 2


def test_train_outputs(trained):
	rows = _rows(trained / "metrics.csv")
	assert rows[0][:6] == ["model", "variant_code", "logloss", "gauc", "n_records", "n_users"]
	assert [row[0] for row in rows[1:]] == ["TIN#1", "TIN#2", "TIN:summary"]
	assert all(row[1] == "111" for row in rows[1:])
	for repeat in (1, 2):
		assert (trained / f"checkpoint_{repeat}.txt").is_file()
		assert _rows(trained / f"loss_{repeat}.csv")[0] == ["step", "loss"]

	registry = RunRegistry(f"sqlite:///{(trained / 'registry.sqlite').as_posix()}")
	registry.logger.disable()
	assert [run["repeat"] for run in registry.get_runs("tin")] == [1, 2]
	registry.close()

	manifest = _manifest(trained)
	assert manifest["config"]["d_cat"] == 4
	assert "metrics.csv" in manifest["output_hashes"]


def test_train_is_deterministic(workspace, trained):
	out = workspace / "tin_again"
	status = _run(
		"train", "--data", workspace / "data", "--variant", "tin", "--encoder", "tte-p",
		"--config", workspace / "train.conf", "--out", out, "--repeats", 1,
	)
	assert status == 0
	assert (out / "checkpoint_1.txt").read_bytes() == (trained / "checkpoint_1.txt").read_bytes()


def test_train_tin_without_encoder_is_tin_wo_tte(workspace, tmp_path):
	status = _run(
		"train", "--data", workspace / "data", "--variant", "tin", "--encoder", "none",
		"--config", workspace / "train.conf", "--out", tmp_path,
	)
	assert status == 0
	assert load_checkpoint(tmp_path / "checkpoint_1.txt").spec.variant is Variant.TIN_WO_TTE


def test_train_ablation_needs_encoder(workspace, tmp_path):
	status = _run(
		"train", "--data", workspace / "data", "--variant", "tin-wo-ta", "--encoder", "none",
		"--config", workspace / "train.conf", "--out", tmp_path,
	)
	assert status == 2


def test_train_din_split(workspace, tmp_path):
	status = _run(
		"train", "--data", workspace / "data", "--variant", "din-split", "--d-ta", 2, "--d-tr", 8,
		"--config", workspace / "train.conf", "--out", tmp_path,
	)
	assert status == 0
	spec = load_checkpoint(tmp_path / "checkpoint_1.txt").spec
	assert (spec.variant, spec.d_ta, spec.d_tr) == (Variant.DIN_SPLIT, 2, 8)


def test_train_missing_data(tmp_path):
	assert _run("train", "--data", tmp_path / "nothing", "--variant", "din", "--out", tmp_path / "out") == 2


def test_eval(workspace, trained, tmp_path):
	report = tmp_path / "report.csv"
	status = _run(
		"eval", "--ckpt", trained / "checkpoint_1.txt", "--data", workspace / "data",
		"--variant", "tin", "--out", report, "--by-length",
	)
	assert status == 0
	rows = _rows(report)
	assert len(rows) == 2
	assert rows[1][:2] == ["TIN", "111"]
	assert rows[1][2:4] == _rows(trained / "metrics.csv")[1][2:4]

	by_length = _rows(tmp_path / "report_by_length.csv")
	assert by_length[0] == ["length", "gauc", "n_records"]
	assert [row[0] for row in by_length[1:]] == ["[1,5)", "[5,10)", "[10,15)", "[15,20)", "[20,inf)"]
	assert "report_by_length.csv" in _manifest(tmp_path)["output_hashes"]


def test_eval_variant_mismatch(workspace, trained):
	status = _run("eval", "--ckpt", trained / "checkpoint_1.txt", "--data", workspace / "data", "--variant", "din")
	assert status == 2


def test_eval_corrupt_checkpoint(workspace, tmp_path):
	(tmp_path / "bad.txt").write_text("not a checkpoint\n", encoding="utf-8")
	assert _run("eval", "--ckpt", tmp_path / "bad.txt", "--data", workspace / "data") == 2


def test_analyze(workspace, trained, tmp_path):
	status = _run(
		"analyze", "--ckpt", trained / "checkpoint_1.txt", "--data", workspace / "data",
		"--target-cat", 0, "--top-k", 3, "--positions", 5, "--out", tmp_path, "--sequences", 2,
	)
	assert status == 0
	truth = read_grid(tmp_path / "ground_truth.csv")
	learned = read_grid(tmp_path / "learned.csv")
	assert truth.shape == learned.shape == (3, 5)
	assert truth.kind is GridKind.GROUND_TRUTH
	assert 0 in truth.row_categories
	pearson = _rows(tmp_path / "pearson.csv")
	assert pearson[0] == ["target_category", "coefficient", "bin"]
	assert pearson[1][0] == "0"
	assert pearson[1][2] in ("poor", "medium", "strong")
	assert [row[0] for row in _rows(tmp_path / "bins.csv")[1:]] == ["poor", "medium", "strong"]
	assert _rows(tmp_path / "sequences.csv")[0] == ["sample", "position", "category", "ground_truth", "learned"]


def test_analyze_sweep(workspace, trained, tmp_path):
	status = _run(
		"analyze", "--ckpt", trained / "checkpoint_1.txt", "--data", workspace / "data",
		"--target-cat", 1, "--out", tmp_path, "--sweep", 4, "--positions", 5,
	)
	assert status == 0
	counts = [int(row[1]) for row in _rows(tmp_path / "bins.csv")[1:]]
	assert sum(counts) == len(_rows(tmp_path / "pearson.csv")) - 1


def test_analyze_absent_target_category(workspace, trained, tmp_path):
	status = _run(
		"analyze", "--ckpt", trained / "checkpoint_1.txt", "--data", workspace / "data",
		"--target-cat", 99, "--out", tmp_path,
	)
	assert status == 3


def test_analyze_unsupported_variant(workspace, tmp_path):
	status = _run(
		"train", "--data", workspace / "data", "--variant", "avg-concat", "--encoder", "none",
		"--config", workspace / "train.conf", "--out", tmp_path / "avg",
	)
	assert status == 0
	status = _run(
		"analyze", "--ckpt", tmp_path / "avg" / "checkpoint_1.txt", "--data", workspace / "data",
		"--target-cat", 0, "--out", tmp_path / "analysis",
	)
	assert status == 2


def test_report(trained, tmp_path):
	url = f"sqlite:///{(trained / 'registry.sqlite').as_posix()}"
	assert _run("report", "--registry", url, "--out", tmp_path / "summary.csv") == 0
	rows = _rows(tmp_path / "summary.csv")
	assert rows[0][:4] == ["variant", "code", "encoder", "repeats"]
	assert rows[1][:4] == ["tin", "111", "tte-p", "2"]


@pytest.mark.parametrize("argv", [[], ["bogus"], ["train", "--variant", "tin"], ["eval", "--ckpt", "x", "--data", "y", "--variant", "lstm"]])
def test_usage_errors_exit_2(argv):
	with pytest.raises(SystemExit) as error:
		main(argv)
	assert error.value.code == 2


def test_log_file_is_json_lines(workspace, trained, tmp_path):
	log_path = tmp_path / "run.log"
	argv = ["--quiet", "--log-file", str(log_path), "eval", "--ckpt", str(trained / "checkpoint_1.txt"), "--data", str(workspace / "data")]
	assert main(argv) == 0
	assert main([*argv, "--variant", "din"]) == 2

	records = [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]
	success = next(record for record in records if record["msg"] == "evaluated")
	assert (success["level"], success["status"], success["logger"]) == ("INFO", "OK", "src")
	assert "gauc" in success and "time" in success
	failure = records[-1]
	assert (failure["level"], failure["status"], failure["error_type"]) == ("ERROR", "USAGE_ERROR", "InvalidSpecError")
	assert failure["subcommand"] == "eval"


@pytest.mark.parametrize("variant, encoder, expected, warns", [
	("tin", None, (Variant.TIN, EncoderKind.TTE_P), False),
	("tin-wo-ta", None, (Variant.TIN_WO_TA, EncoderKind.TTE_P), False),
	("din", None, (Variant.DIN, EncoderKind.NONE), False),
	("din-split", None, (Variant.DIN_SPLIT, EncoderKind.NONE), False),
	("tin", "coe", (Variant.TIN, EncoderKind.COE), False),
	("din", "tte-p", (Variant.DIN, EncoderKind.NONE), True),
	("tin", "none", (Variant.TIN_WO_TTE, EncoderKind.NONE), True),
])
def test_resolve_variant(tmp_path, variant, encoder, expected, warns):
	logger = TinLogger("tests.cli.resolve", log_path=tmp_path / "log.jsonl")
	logger.enable(stream=False)
	assert resolve_variant(variant, encoder, logger) == expected
	logger.close()
	records = (tmp_path / "log.jsonl").read_text(encoding="utf-8").splitlines()
	assert bool(records) is warns


def test_train_default_encoder_without_warning(workspace, tmp_path):
	log_path = tmp_path / "run.log"
	status = main([
		"--quiet", "--log-file", str(log_path), "train", "--data", str(workspace / "data"), "--variant", "din",
		"--config", str(workspace / "train.conf"), "--out", str(tmp_path / "din"),
	])
	assert status == 0
	assert load_checkpoint(tmp_path / "din" / "checkpoint_1.txt").spec.encoder is EncoderKind.NONE
	records = [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]
	assert not [record for record in records if record["level"] == "WARNING"]


def test_train_failure_closes_registry(workspace, tmp_path, monkeypatch):
	closed = []
	original_close = RunRegistry.close

	def close(registry):
		closed.append(True)
		original_close(registry)

	def failing_train(*args, **kwargs):
		raise NumericError("non-finite loss at epoch 1, batch 1")

	monkeypatch.setattr(RunRegistry, "close", close)
	monkeypatch.setattr(cli, "train", failing_train)
	status = _run(
		"train", "--data", workspace / "data", "--variant", "din",
		"--config", workspace / "train.conf", "--out", tmp_path,
	)
	assert status == 4
	assert closed == [True]

import numpy as np
import pytest

from src import EmptyDatasetError, ParseError
from src.data import (
	DatasetStats, Interaction, Sample, SynthParams, build_leave_one_out, dataset_stats, load_interactions,
	planted_logit, read_id_dictionary, read_samples, read_stats, split_synthetic, synth_generate,
	validate_sample, write_id_dictionary, write_samples, write_stats,
)


def _user_sequence(user_id, n, first_item=0, n_categories=3):
	return [Interaction(user_id, first_item + k, (first_item + k) % n_categories, 100 * (k + 1)) for k in range(n)]


def test_load_fixture(interactions_path):
	log = load_interactions(interactions_path)
	stats = log.stats()
	assert stats.n_users == 50
	assert stats.n_samples == 485
	assert all(interaction.item_id < stats.n_items for interaction in log.interactions)
	assert all(interaction.category_id < stats.n_categories for interaction in log.interactions)


def test_load_interactions_first_seen_ids(tmp_path):
	path = tmp_path / "log.tsv"
	path.write_text("alice\tb1\tbooks\t10\nbob\tp1\tphones\t5\nalice\tp1\tphones\t20\n", encoding="utf-8")
	log = load_interactions(path)
	assert log.stats() == DatasetStats(n_users=2, n_items=2, n_categories=2, n_samples=3)
	assert log.users.ids == {"alice": 0, "bob": 1}
	assert log.interactions[2] == Interaction(0, 1, 1, 20)
	assert log.item_categories() == {0: 0, 1: 1}


def test_load_interactions_empty_file(tmp_path):
	path = tmp_path / "empty.tsv"
	path.write_text("", encoding="utf-8")
	log = load_interactions(path)
	assert log.interactions == []
	assert len(log.users) == len(log.items) == len(log.categories) == 0


def test_load_interactions_keeps_duplicates(tmp_path):
	path = tmp_path / "dup.tsv"
	path.write_text("u\ti\tc\t1\nu\ti\tc\t1\n", encoding="utf-8")
	assert len(load_interactions(path).interactions) == 2


@pytest.mark.parametrize("bad_row", [
	"u\ti\tc\tyesterday",
	"u\ti\tc",
	"u\ti\tc\t1\textra",
	" \ti\tc\t1",
])
def test_load_interactions_bad_row_names_line(tmp_path, bad_row):
	path = tmp_path / "bad.tsv"
	path.write_text(f"u\ti\tc\t1\n\n{bad_row}\n", encoding="utf-8")
	with pytest.raises(ParseError) as error:
		load_interactions(path)
	assert error.value.line_number == 3


def test_id_dictionary_file(tmp_path, interactions_path):
	log = load_interactions(interactions_path)
	write_id_dictionary(log.items, tmp_path / "items.tsv")
	assert read_id_dictionary(tmp_path / "items.tsv").ids == log.items.ids


def test_leave_one_out_five_interactions():
	train, test = build_leave_one_out(_user_sequence(0, 5), max_len=100, seed=1)
	assert [sample.label for sample in train] == [1, 0, 1, 0, 1, 0]
	assert [sample.label for sample in test] == [1, 0]
	assert [sample.length for sample in train if sample.label == 1] == [1, 2, 3]
	assert test[0].target.item_id == 4
	assert test[0].length == 4


def test_leave_one_out_negative_shares_history_and_time():
	train, test = build_leave_one_out(_user_sequence(0, 8, n_categories=4), max_len=100, seed=3, neg_per_pos=2)
	for samples in (train, test):
		for start in range(0, len(samples), 3):
			positive, negatives = samples[start], samples[start + 1:start + 3]
			for negative in negatives:
				assert negative.label == 0
				assert negative.history == positive.history
				assert negative.target.timestamp == positive.target.timestamp
				assert negative.target.user_id == positive.target.user_id
				assert negative.target.item_id != positive.target.item_id
				assert negative.target.category_id == negative.target.item_id % 4


def test_leave_one_out_deterministic(interactions_path):
	interactions = load_interactions(interactions_path).interactions
	first = build_leave_one_out(interactions, max_len=10, seed=7)
	second = build_leave_one_out(list(reversed(interactions)), max_len=10, seed=7)
	assert first == second
	assert first != build_leave_one_out(interactions, max_len=10, seed=8)


def test_leave_one_out_truncates_to_most_recent():
	sequence = _user_sequence(0, 12)
	train, test = build_leave_one_out(sequence, max_len=3, seed=0)
	assert all(sample.length <= 3 for sample in train + test)
	assert test[0].history == tuple(sequence[8:11])


def test_leave_one_out_partition(interactions_path):
	train, test = build_leave_one_out(load_interactions(interactions_path).interactions, max_len=100, seed=0)
	test_targets = {(s.user_id, s.target.timestamp) for s in test if s.label == 1}
	train_targets = {(s.user_id, s.target.timestamp) for s in train if s.label == 1}
	assert not test_targets & train_targets
	assert all(not validate_sample(sample, max_len=100) for sample in train + test)


def test_leave_one_out_drops_short_users():
	interactions = _user_sequence(0, 4) + _user_sequence(1, 6, first_item=10)
	_, test = build_leave_one_out(interactions, max_len=100, seed=0)
	assert {sample.user_id for sample in test} == {1}


def test_leave_one_out_no_eligible_user():
	with pytest.raises(EmptyDatasetError):
		build_leave_one_out(_user_sequence(0, 3), max_len=100, seed=0)


def test_leave_one_out_needs_seed():
	with pytest.raises(ValueError):
		build_leave_one_out(_user_sequence(0, 6), max_len=100, seed=None)


@pytest.mark.parametrize("mutate, message", [
	(lambda s: Sample(s.history, s.target, 2), "label"),
	(lambda s: Sample((), s.target, 1), "empty"),
	(lambda s: Sample(s.history, Interaction(0, 0, 0, 0), 1), "after target"),
])
def test_validate_sample(mutate, message):
	sample = Sample(tuple(_user_sequence(0, 3)), Interaction(0, 9, 0, 1000), 1)
	assert validate_sample(sample) == []
	assert any(message in error for error in validate_sample(mutate(sample)))


def test_synth_generate_shape_and_ids():
	dataset = synth_generate(30, 4, 8, 0.7, 3.0, -1.0, seed=5, items_per_category=3)
	assert len(dataset.samples) == 30 * 4
	assert dataset.n_items == 12
	for sample in dataset.samples:
		assert not validate_sample(sample, max_len=8)
		assert 4 <= sample.length <= 8
		for interaction in (*sample.history, sample.target):
			assert interaction.item_id // 3 == interaction.category_id


def test_synth_generate_deterministic():
	first = synth_generate(20, 3, 6, 0.5, 2.0, 0.0, seed=11).samples
	assert first == synth_generate(20, 3, 6, 0.5, 2.0, 0.0, seed=11).samples
	assert first != synth_generate(20, 3, 6, 0.5, 2.0, 0.0, seed=12).samples


@pytest.mark.parametrize("kwargs", [
	{"n_users": 0}, {"n_categories": 0}, {"h_max": 0}, {"decay": 0.0}, {"decay": 1.5},
	{"match_boost": float("inf")}, {"items_per_category": 0}, {"min_len": 9}, {"targets_per_user": 0},
])
def test_synth_params_validation(kwargs):
	arguments = dict(n_users=5, n_categories=3, h_max=8, decay=0.7, match_boost=3.0, base_logit=-1.0, seed=0)
	arguments.update(kwargs)
	with pytest.raises(ValueError):
		synth_generate(**arguments)


def test_planted_logit():
	params = SynthParams(1, 3, 4, 0.5, 2.0, -1.0, 0)
	# categories oldest -> newest; positions 3, 2, 1
	assert planted_logit(params, [1, 0, 1], 1) == pytest.approx(-1.0 + 2.0 * (0.125 + 0.5))
	assert planted_logit(params, [0, 0, 0], 1) == -1.0


def test_planted_logit_no_decay_is_position_free():
	params = SynthParams(1, 3, 4, 1.0, 2.0, 0.0, 0)
	assert planted_logit(params, [2, 0, 0], 2) == planted_logit(params, [0, 0, 2], 2)


def test_split_synthetic_by_user():
	samples = synth_generate(10, 3, 5, 0.7, 1.0, 0.0, seed=0).samples
	train, test = split_synthetic(samples, 0.2)
	assert {sample.user_id for sample in test} == {8, 9}
	assert len(train) + len(test) == len(samples)
	with pytest.raises(ValueError):
		split_synthetic(samples, 1.0)


def test_sample_file(tmp_path, sample_n_random_samples):
	samples = sample_n_random_samples(25)
	path = tmp_path / "samples.tsv"
	params = SynthParams(3, 2, 4, 0.7, 3.0, -1.0, 9)
	write_samples(samples, path, params.header())
	read_back, header = read_samples(path)
	assert read_back == samples
	assert SynthParams.from_header(header) == params


def test_sample_record_without_user_column(tmp_path):
	path = tmp_path / "samples.tsv"
	path.write_text("1\t2\t3:1:10,4:2:20\t5:1:30\n", encoding="utf-8")
	(sample,), header = read_samples(path)
	assert header == {}
	assert sample.user_id == -1
	assert sample.history[1] == Interaction(-1, 4, 2, 20)


@pytest.mark.parametrize("line", [
	"1\t3\t3:1:10,4:2:20\t5:1:30\t0",
	"2\t1\t3:1:10\t5:1:30\t0",
	"1\t1\t3:1\t5:1:30\t0",
	"1\t1\t3:x:10\t5:1:30\t0",
	"1\t1\t3:1:10",
])
def test_sample_record_errors(tmp_path, line):
	path = tmp_path / "samples.tsv"
	path.write_text(f"# note: x\n{line}\n", encoding="utf-8")
	with pytest.raises(ParseError) as error:
		read_samples(path)
	assert error.value.line_number == 2


def test_stats_file(tmp_path, sample_n_random_samples):
	stats = dataset_stats(sample_n_random_samples(12))
	assert stats.n_samples == 12
	assert stats.n_users == 6
	write_stats(stats, tmp_path / "stats.tsv")
	assert read_stats(tmp_path / "stats.tsv") == stats

	(tmp_path / "bad.tsv").write_text("n_users\tmany\n", encoding="utf-8")
	with pytest.raises(ParseError):
		read_stats(tmp_path / "bad.tsv")

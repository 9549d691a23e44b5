import io
import json

import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli

QUICK = ['--n', '10', '--trials', '50', '--seed', '7', '--quiet', '--no-audit']


@pytest.fixture
def runner():
    return CliRunner()


def _csv(text):
    return pd.read_csv(io.StringIO(text))


def test_validate_prints_json_report(runner):
    # WHEN
    result = runner.invoke(cli, ['validate', 'coupon_collector'] + QUICK)

    # THEN
    report = json.loads(result.stdout)
    assert report['suite'] == 'coupon_collector'
    assert report['seed'] == 7
    assert report['trials'] == 50
    assert result.exit_code == (0 if all(m['pass'] for m in report['metrics']) else 1)


def test_validate_is_deterministic(runner):
    first = runner.invoke(cli, ['validate', 'coupon_collector'] + QUICK)
    second = runner.invoke(cli, ['validate', 'coupon_collector'] + QUICK)
    assert first.stdout == second.stdout


def test_validate_writes_csv_report(runner, tmp_path):
    out = tmp_path / "reports" / "coupon.csv"
    runner.invoke(cli, ['validate', 'coupon_collector', '--format', 'csv', '--out', str(out)] + QUICK)
    frame = pd.read_csv(out)
    assert list(frame.columns[:4]) == ['suite', 'seed', 'trials', 'name']
    assert len(frame) == 1


def test_validate_unknown_suite(runner):
    result = runner.invoke(cli, ['validate', 'bogosort', '--quiet', '--no-audit'])
    assert result.exit_code == 1


def test_hash_sample(runner):
    result = runner.invoke(cli, ['hash', 'sample', '--family', 'mod_p', '--param', 'universe_max=1000',
                                 '--param', 'm=16', '--seed', '3'])
    assert result.exit_code == 0
    handle = json.loads(result.stdout)
    assert handle['family'] == 'mod_p'
    assert handle['m'] == 16


def test_hash_sample_missing_param(runner):
    result = runner.invoke(cli, ['hash', 'sample', '--family', 'multiply_shift', '--param', 'k=8'])
    assert result.exit_code == 1


def test_bench_treap(runner, tmp_path):
    # GIVEN
    ops = tmp_path / "ops.txt"
    ops.write_text("insert 5 five\ninsert 6\ninsert 5\nsearch 5\ndelete 7\n", encoding='utf-8')

    # WHEN
    result = runner.invoke(cli, ['bench', 'treap', '--ops', str(ops), '--seed', '1'])

    # THEN
    assert result.exit_code == 0
    row = _csv(result.stdout).iloc[0]
    assert (row['operations'], row['found'], row['rejected'], row['size']) == (5, 1, 2, 2)


def test_sketch_replay(runner, tmp_path):
    # GIVEN
    stream = tmp_path / "stream.txt"
    stream.write_text("1 5\n2 3\n1 2\n", encoding='utf-8')
    queries = tmp_path / "queries.txt"
    queries.write_text("1\n2\n", encoding='utf-8')

    # WHEN
    result = runner.invoke(cli, ['sketch', 'replay', '--input', str(stream), '--query', str(queries)])

    # THEN
    assert result.exit_code == 0
    frame = _csv(result.stdout)
    assert list(frame['index']) == [1, 2]
    assert frame['estimate'][0] >= 7
    assert frame['estimate'][1] >= 3


def test_mincut_on_bridge_graph(runner, tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("6 7\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n", encoding='utf-8')
    result = runner.invoke(cli, ['mincut', '--graph', str(graph), '--seed', '11'])
    assert result.exit_code == 0
    assert "cut_size=1" in result.stdout
    assert "side=0 1 2" in result.stdout


def test_lsh_query_finds_exact_match(runner, tmp_path):
    # GIVEN
    points = tmp_path / "points.txt"
    points.write_text("00000000\n11110000\n00001111\n11111111\n", encoding='utf-8')
    queries = tmp_path / "queries.txt"
    queries.write_text("11110000\n", encoding='utf-8')

    # WHEN
    result = runner.invoke(cli, ['lsh', 'query', '--points', str(points), '--queries', str(queries),
                                 '--output', 'csv'])

    # THEN
    assert result.exit_code == 0
    row = _csv(result.stdout).iloc[0]
    assert (row['point'], row['distance'], row['exact_distance']) == (1, 0, 0)


def test_lsh_query_prints_one_line_per_query(runner, tmp_path):
    # GIVEN
    points = tmp_path / "points.txt"
    points.write_text("00000000\n11110000\n00001111\n11111111\n", encoding='utf-8')
    queries = tmp_path / "queries.txt"
    queries.write_text("00001111\n11111111\n", encoding='utf-8')

    # WHEN
    result = runner.invoke(cli, ['lsh', 'query', '--points', str(points), '--queries', str(queries)])

    # THEN
    assert result.exit_code == 0
    assert result.stdout.splitlines() == ["0 2 0", "1 3 0"]


def test_info_lists_suites(runner):
    result = runner.invoke(cli, ['info'])
    assert result.exit_code == 0
    assert "coupon_collector" in result.output

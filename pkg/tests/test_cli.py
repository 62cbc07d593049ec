import json
import re

import pytest
from click.testing import CliRunner

from cli import cli
from corpus import encode, generate
from runlog import get_runs
from suites import LEVELS


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def text_file(tmp_path):
    path = tmp_path / 'text.txt'
    path.write_bytes(encode(generate('runs', 256, 4, 5), 4))
    return path


def test_gen_fibonacci(runner):
    result = runner.invoke(cli, ['gen', '--kind', 'fibonacci', '--n', '13'])
    assert result.exit_code == 0
    assert result.stdout_bytes == b"abaababaabaab"
    assert get_runs(command='gen')[0]['params']['sigma'] == 2


def test_gen_to_file(runner, tmp_path):
    out = tmp_path / 'g.bin'
    result = runner.invoke(cli, ['gen', '--n', '10', '--sigma', '300', '--out', str(out)])
    assert result.exit_code == 0
    assert len(out.read_bytes()) == 40
    assert 'wrote 10 symbols' in result.stderr
    assert '--format u32le' in result.stderr


def test_lce_answers(runner, tmp_path):
    path = tmp_path / 'ab.txt'
    path.write_bytes(b"abababab")
    result = runner.invoke(cli, ['lce', '--input', str(path), '--tau', '4'], input="0 2\n\n1 3\n")
    assert result.exit_code == 0
    assert result.output == "6\n5\n"


def test_lce_rejects_bad_query(runner, tmp_path):
    path = tmp_path / 'ab.txt'
    path.write_bytes(b"abababab")
    result = runner.invoke(cli, ['lce', '--input', str(path), '--tau', '4'], input="0 x\n")
    assert result.exit_code == 2
    assert 'query line 1' in result.stderr
    assert get_runs(command='lce')[0]['status'] == 'error'


def test_lce_rejects_position_past_end(runner, tmp_path):
    path = tmp_path / 'ab.txt'
    path.write_bytes(b"abababab")
    result = runner.invoke(cli, ['lce', '--input', str(path), '--tau', '4'], input="0 8\n")
    assert result.exit_code == 2


@pytest.mark.parametrize('args', [['--tau', '3'], ['--tau', '8', '--b', '4'], [],
                                  ['--tau', '16', '--mode', 'reference', '--lambda3', '4']])
def test_parameter_errors(runner, text_file, args):
    result = runner.invoke(cli, ['build-partition', '--input', str(text_file)] + args)
    assert result.exit_code == 2


def test_missing_input(runner, tmp_path):
    result = runner.invoke(cli, ['build-partition', '--input', str(tmp_path / 'nope'), '--tau', '8'])
    assert result.exit_code == 2


def test_build_partition(runner, text_file, tmp_path):
    out = tmp_path / 'sstar.txt'
    stats_path = tmp_path / 'stats.json'
    result = runner.invoke(cli, ['build-partition', '--input', str(text_file), '--tau', '16',
                                 '--out', str(out), '--stats', str(stats_path)])
    assert result.exit_code == 0
    positions = [int(line) for line in out.read_text().split()]
    assert positions == sorted(set(positions))
    stats = json.loads(stats_path.read_text())
    assert stats['sizes']['s_star'] == len(positions)
    assert stats['params']['tau'] == 16
    assert get_runs(command='build-partition')[0]['status'] == 'ok'


def test_build_partition_from_b(runner, text_file):
    result = runner.invoke(cli, ['build-partition', '--input', str(text_file), '--b', '16'])
    assert result.exit_code == 0
    assert result.output.strip()


def test_sst(runner, text_file, tmp_path):
    suffixes = tmp_path / 'suffixes.txt'
    suffixes.write_text("0\n5\n\n9\n200\n")
    result = runner.invoke(cli, ['sst', '--input', str(text_file), '--tau', '16',
                                 '--suffixes', str(suffixes)])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0].startswith('node 0 parent -1')
    assert sum(1 for line in lines if ' leaf ' in line) == 4


def test_sst_rejects_duplicates(runner, text_file, tmp_path):
    suffixes = tmp_path / 'suffixes.txt'
    suffixes.write_text("3\n3\n")
    result = runner.invoke(cli, ['sst', '--input', str(text_file), '--tau', '16',
                                 '--suffixes', str(suffixes)])
    assert result.exit_code == 2


@pytest.mark.slow
@pytest.mark.parametrize('level', LEVELS)
def test_verify_levels(runner, level):
    result = runner.invoke(cli, ['verify', '--level', level, '--n', '128',
                                 '--queries', '100', '--suffixes', '8'])
    assert result.exit_code == 0, result.output
    assert re.search(rf'^level={level} instances=\d+ checks=\d+ failed=0\b', result.output, re.M)


@pytest.mark.slow
def test_verify_final_reports_what_ran(runner):
    result = runner.invoke(cli, ['verify', '--level', 'final', '--n', '256'])
    assert result.exit_code == 0, result.output
    line = result.output.strip().splitlines()[-1]
    assert int(re.search(r' phases=(\d+)', line).group(1)) > 0
    assert int(re.search(r' steps=(\d+)', line).group(1)) > 0


def test_verify_needs_tau_with_input(runner, text_file):
    result = runner.invoke(cli, ['verify', '--level', 'lce', '--input', str(text_file)])
    assert result.exit_code == 2


def test_verify_single_input(runner, text_file):
    result = runner.invoke(cli, ['verify', '--level', 'lce', '--input', str(text_file),
                                 '--tau', '16', '--queries', '200'])
    assert result.exit_code == 0
    assert 'level=lce instances=1' in result.output


def test_runs_listing(runner):
    runner.invoke(cli, ['gen', '--n', '8'])
    result = runner.invoke(cli, ['runs'])
    assert result.exit_code == 0
    assert ' gen ok ' in result.output

    result = runner.invoke(cli, ['runs', '--stats'])
    assert 'command gen 1' in result.output


def test_runs_pause(runner):
    assert runner.invoke(cli, ['runs', '--pause']).output == "run logging paused\n"
    runner.invoke(cli, ['gen', '--n', '8'])
    assert get_runs() == []
    assert runner.invoke(cli, ['runs', '--pause', '--resume']).exit_code == 2


def test_lce_answers_each_line_before_the_next(runner, tmp_path):
    path = tmp_path / 'ab.txt'
    path.write_bytes(b"abababab")
    result = runner.invoke(cli, ['lce', '--input', str(path), '--tau', '4'], input="0 2\n1 3\n0 x\n")
    assert result.exit_code == 2
    assert result.stdout == "6\n5\n"
    assert 'query line 3' in result.stderr


def test_lce_to_file(runner, tmp_path):
    path = tmp_path / 'ab.txt'
    path.write_bytes(b"abababab")
    out = tmp_path / 'answers.txt'
    result = runner.invoke(cli, ['lce', '--input', str(path), '--tau', '4', '--out', str(out)],
                           input="0 2\n3 3\n")
    assert result.exit_code == 0
    assert result.stdout == ""
    assert out.read_text() == "6\n5\n"


def test_build_partition_b_sets_tau(runner, text_file, tmp_path):
    stats_path = tmp_path / 'stats.json'
    result = runner.invoke(cli, ['build-partition', '--input', str(text_file), '--b', '16',
                                 '--stats', str(stats_path)])
    assert result.exit_code == 0
    assert json.loads(stats_path.read_text())['params']['tau'] == 16


@pytest.mark.parametrize('b', ['0', '-3', '1000'])
def test_build_partition_rejects_bad_b(runner, text_file, b):
    result = runner.invoke(cli, ['build-partition', '--input', str(text_file), '--b', b])
    assert result.exit_code == 2

import pytest

from conftest import corpus_text, text_of
from corpus import random_symbols
from errors import PipelineOrderError
from oracle import (check_repeat_regions, check_value_bound, check_value_structure, direct_refine,
                    phase_values)
from refine import (INF, Collector, LeveledProvider, Pipeline, RecordingProvider, RefinePhase,
                    ScanProvider, TextLceProvider, WindowProvider, make_leveled_provider,
                    make_window_provider, phase_step, predicate_r, run_pipeline, select_provider,
                    v_chain, vprime)
from text_model import Text, make_params, reference_lambda3


def _params(text, tau, lambda3=2):
    return make_params(text.n, tau, 'desk', lambda3=lambda3, symbol_bits=text.w)


def test_no_phases_passes_everything():
    text = corpus_text('random', 64)
    params = _params(text, 16)
    assert params.phase_count == 0
    assert list(run_pipeline(text, params)) == list(range(64))


@pytest.mark.parametrize('kind', ['random', 'periodic', 'fibonacci', 'runs'])
def test_streaming_matches_direct(kind):
    text = corpus_text(kind, 512, 3)
    params = _params(text, 256)
    assert params.phase_count == 3
    levels = direct_refine(text, params)
    for k in range(1, params.phase_count + 1):
        assert list(run_pipeline(text, params, upto=k)) == levels[k]


def test_unary_text_keeps_the_borders():
    text = Text([0] * 256)
    params = _params(text, 128)
    levels = direct_refine(text, params)
    assert list(run_pipeline(text, params)) == levels[-1]


@pytest.mark.parametrize('factory', [
    lambda t, p: ScanProvider(t),
    lambda t, p: TextLceProvider(t),
    lambda t, p: make_window_provider(t, 6 << p.phase_count),
    lambda t, p: make_window_provider(t, 100),
])
def test_providers_agree(factory):
    text = corpus_text('runs', 512, 2)
    params = _params(text, 256)
    expected = direct_refine(text, params)[-1]
    assert list(run_pipeline(text, params, factory)) == expected


def test_leveled_provider_agrees():
    text = corpus_text('random', 4096, 4)
    params = _params(text, 128)
    provider = make_leveled_provider(text, params)
    assert provider.b_hat == 2
    assert provider.per_level == 1
    expected = list(run_pipeline(text, params, lambda t, p: ScanProvider(t)))
    assert list(run_pipeline(text, params, make_leveled_provider)) == expected


def test_queries_stay_behind_the_driver():
    text = corpus_text('fibonacci', 512)
    params = _params(text, 256)
    recorders = []

    def factory(t, p):
        recorders.append(RecordingProvider(TextLceProvider(t)))
        return recorders[-1]

    sink = Collector()
    pipeline = Pipeline(text, params, sink, factory)
    recorder = recorders[0]
    for d in range(text.n):
        recorder.clock = d
        pipeline.step(d)
    recorder.clock = text.n
    pipeline.close()
    assert recorder.log
    for clock, k, p, q, cap, answer in recorder.log:
        assert p < q <= clock
        assert q - p <= 1 << (k - 1)
        assert cap == (1 << k) + 1
    assert sink.finished


def test_phase_rejects_out_of_order_positions():
    text = corpus_text('random', 32)
    phase = RefinePhase(1, ScanProvider(text))
    phase.downstream = Collector()
    phase.feed(5)
    with pytest.raises(PipelineOrderError):
        phase.feed(3)


def test_phase_step_collects_output():
    text = corpus_text('random', 128)
    phase = RefinePhase(1, ScanProvider(text))
    emitted = []
    for d in range(text.n):
        emitted.extend(phase_step(phase, d))
    emitted.extend(phase_step(phase, None))
    assert emitted == list(run_pipeline(text, _params(text, 64), lambda t, p: ScanProvider(t), upto=1))


def test_rule_pieces():
    unary = ScanProvider(Text([0] * 16))
    alternating = ScanProvider(text_of('abababab'))
    assert predicate_r(1, 0, 1, unary)
    assert not predicate_r(1, 0, 1, alternating)
    assert not predicate_r(1, 0, 2, unary)
    assert vprime(1, 0, None, unary) == INF
    assert vprime(1, 0, 1, unary) == INF
    assert vprime(1, 0, 1, alternating) != INF
    assert v_chain(1, [0, 1, 2, 3, 4], unary) == INF


def test_select_provider():
    text = corpus_text('random', 1024)
    assert isinstance(select_provider(text, make_params(1024, 16, 'desk')), TextLceProvider)
    assert isinstance(select_provider(text, make_params(1024, 16, 'reference')), WindowProvider)
    chosen = select_provider(text, make_params(1024, 64, 'reference'))
    assert isinstance(chosen, (LeveledProvider, WindowProvider))


def test_pipeline_stats():
    text = corpus_text('random', 512)
    params = _params(text, 256)
    pipeline = Pipeline(text, params, Collector())
    pipeline.drive()
    stats = pipeline.stats()
    assert [phase['k'] for phase in stats['phases']] == [1, 2, 3]
    assert stats['phases'][0]['fed'] == 512
    assert stats['provider']['provider'] == 'text'


def test_unary_pair_is_a_repeat():
    assert predicate_r(1, 3, 4, ScanProvider(Text([0] * 50)))


def test_v_chain_on_period_four():
    text = text_of('aabb' * 16)
    provider = ScanProvider(text)
    values = [v_chain(1, range(h, h + 5), provider) for h in range(40)]
    assert INF not in values
    for x, y in zip(values, values[1:]):
        assert x != y


def test_period_four_matches_direct():
    text = text_of('aabb' * 32)
    params = _params(text, 64)
    assert params.phase_count == 1
    assert list(run_pipeline(text, params, lambda t, p: ScanProvider(t))) == direct_refine(text, params)[1]


@pytest.mark.parametrize('kind', ['random', 'periodic', 'mixed', 'runs'])
def test_phase_contracts_hold(kind):
    text = corpus_text(kind, 512, 3)
    params = _params(text, 256)
    levels = direct_refine(text, params)
    lambda3 = reference_lambda3(text.n, text.w)
    for k in range(1, params.phase_count + 1):
        assert check_repeat_regions(text, levels[k - 1], levels[k], k).holds
        assert check_value_structure(text, levels[k - 1], k).holds
        assert check_value_bound(text, levels[k - 1], k, lambda3).holds


def test_repeat_regions_cover_a_unary_stretch():
    text = Text(random_symbols(100, 4, 1) + [2] * 100 + random_symbols(100, 4, 2))
    params = _params(text, 150)
    levels = direct_refine(text, params)
    for k in range(1, params.phase_count + 1):
        report = check_repeat_regions(text, levels[k - 1], levels[k], k)
        assert report.holds
    assert check_repeat_regions(text, levels[0], levels[1], 1).checked_pairs > 0


def test_repeat_regions_flag_a_wrong_kept_set():
    text = Text([0] * 64)
    report = check_repeat_regions(text, list(range(64)), [], 1)
    assert not report.holds


def test_value_structure_on_random_text():
    text = corpus_text('random', 256, 4)
    prime, values, _, _ = phase_values(text, list(range(text.n)), 1)
    assert sum(1 for x in prime if x != INF) > 100
    report = check_value_structure(text, list(range(text.n)), 1)
    assert report.holds
    assert report.checked_pairs > 0


def test_value_bound_flags_a_small_lambda():
    text = corpus_text('random', 256, 4)
    assert not check_value_bound(text, list(range(text.n)), 1, 0).holds


def _recorded(inner_factory, recorders):
    def factory(t, p):
        recorders.append(RecordingProvider(inner_factory(t, p)))
        return recorders[-1]
    return factory


@pytest.mark.parametrize('inner', [
    lambda t, p: TextLceProvider(t),
    lambda t, p: make_window_provider(t, 6 << p.phase_count),
    lambda t, p: make_window_provider(t, 100),
])
def test_recorded_answers_replay_against_a_scan(inner):
    text = corpus_text('mixed', 512, 2)
    params = _params(text, 256)
    recorders = []
    list(run_pipeline(text, params, _recorded(inner, recorders)))
    scan = ScanProvider(text)
    assert recorders[0].log
    for _, k, p, q, cap, answer in recorders[0].log:
        assert scan.lce(k, p, q, cap) == answer


def test_leveled_answers_replay_against_a_scan():
    text = corpus_text('random', 4096, 4)
    params = _params(text, 128)
    recorders = []
    list(run_pipeline(text, params, _recorded(make_leveled_provider, recorders)))
    scan = ScanProvider(text)
    assert recorders[0].log
    for _, k, p, q, cap, answer in recorders[0].log:
        assert scan.lce(k, p, q, cap) == answer


@pytest.mark.parametrize('kind', ['random', 'periodic', 'fibonacci'])
def test_queries_trail_the_driver_by_a_bounded_lag(kind):
    text = corpus_text(kind, 512)
    params = _params(text, 256)
    recorders = []
    pipeline = Pipeline(text, params, Collector(), _recorded(lambda t, p: TextLceProvider(t), recorders))
    recorder = recorders[0]
    for d in range(text.n):
        recorder.clock = d
        pipeline.step(d)
    recorder.clock = text.n
    pipeline.close()
    for clock, k, p, q, cap, answer in recorder.log:
        assert min(p, q) > clock - 6 * (1 << k)


def test_window_provider_scans_each_symbol_a_bounded_number_of_times():
    text = corpus_text('runs', 2048, 2)
    params = _params(text, 256)
    providers = []

    def factory(t, p):
        providers.append(make_window_provider(t, 100))
        return providers[-1]

    list(run_pipeline(text, params, factory))
    gate = providers[0].gate
    assert gate.symbols_scanned <= 3 * text.n
    assert gate.rebuilds <= text.n // 100 + 1


def test_leveled_provider_windows_stay_small():
    text = corpus_text('random', 4096, 4)
    params = _params(text, 128)
    providers = []

    def factory(t, p):
        providers.append(make_leveled_provider(t, p))
        return providers[-1]

    list(run_pipeline(text, params, factory))
    provider = providers[0]
    assert len(provider.gates) == 2
    assert provider.gates[0].peak_entries <= 24 * provider.b_hat
    for gate in provider.gates:
        assert gate.rebuilds > 0
        assert gate.peak_entries <= 64 * 24 * provider.b_hat

"""
TauSet - Verification suites
One runner per verify level. Each runner takes a corpus instance and
returns PropertyReports; an InvariantBreach raised by the pipeline is
reported as a violation of the 'invariant' check instead of escaping.
"""

import logging
from collections import defaultdict

import numpy as np

import config
from corpus import Instance, Lcg
from errors import InvariantBreach, RecompressionStall
from lce_index import build_lce_index
from oracle import (PropertyReport, check_c_converse, check_local_sparsity, check_property_a,
                    check_property_b, check_property_c, check_repeat_regions, check_value_bound,
                    check_value_structure, direct_refine, direct_stage1, naive_lce, oracle_trie,
                    same_tree)
from refine import Collector, Pipeline, run_pipeline
from sparsify import Stage1, build_partition, build_R, recompress_loop
from sst_core import build_sparse_tree
from sst_user import build_user_sst, minimal_period, suffix_tuples
from text_model import make_params, params_for_text, phase_count_for, reference_lambda3

logger = logging.getLogger(__name__)

LEVELS = ('phases', 'stage1', 'letters', 'recompression', 'final', 'lce', 'sst')
SIZE_EXPONENT = 16
QUERY_COST_FACTOR = 32
PHASE_TEXT_LIMIT = 512
LETTER_TEXT_LIMIT = 1024
RECOMPRESSION_SLACK = -8        # low enough that the loop runs on short texts


def _params(instance, options):
    """Desk parameters; lambda3=2 and the lowered slack unless the options say otherwise."""
    overrides = {'lambda3': 2, 'shrink_slack': RECOMPRESSION_SLACK}
    overrides.update({key: options[key] for key in ('lambda3', 'lambda4', 'shrink_slack')
                      if options.get(key) is not None})
    return params_for_text(instance.text, instance.tau, 'desk', **overrides)


def _sprime(text, params):
    """(S_K, S') for the instance, both as lists."""
    sk = list(run_pipeline(text, params))
    sink = Collector()
    stage1 = Stage1(text, params)
    stage1.downstream = sink
    Pipeline(text, params, stage1).drive()
    return sk, sink.items


def _invariant(e):
    report = PropertyReport('invariant')
    report.add(error=type(e).__name__, message=str(e).replace(' ', '_'))
    return report


# =============================================================================
# LEVEL RUNNERS
# =============================================================================

def run_phases(instance, options):
    """Streaming phases against the direct rule, plus the per-phase contracts."""
    text = instance.text
    if text.n > PHASE_TEXT_LIMIT:
        return []
    params = make_params(text.n, text.n // 2, 'desk', lambda3=options.get('lambda3') or 2,
                         symbol_bits=text.w)
    levels = direct_refine(text, params)
    lambda3 = reference_lambda3(text.n, text.w)
    reports = []
    equal = PropertyReport('phase_equal')
    for k in range(1, params.phase_count + 1):
        streamed = list(run_pipeline(text, params, upto=k))
        equal.checked_pairs += 1
        equal.note('phases')
        if streamed != levels[k]:
            first = next((x for x, y in zip(streamed, levels[k]) if x != y), None)
            equal.add(k=k, streamed=len(streamed), direct=len(levels[k]), first=first)
        tau_k = 1 << (k + 3)
        reports.append(check_property_a(text, levels[k], tau_k))
        reports.append(check_property_b(text, levels[k], tau_k))
        reports.append(check_property_c(text, levels[k], tau_k * params.lambda3))
        reports.append(check_local_sparsity(levels[k], k, text.n))
        reports.append(check_repeat_regions(text, levels[k - 1], streamed, k))
        reports.append(check_value_structure(text, levels[k - 1], k))
        reports.append(check_value_bound(text, levels[k - 1], k, lambda3))
    reports.append(equal)
    return reports


def run_stage1(instance, options):
    text, tau = instance.text, instance.tau
    params = _params(instance, options)
    sk, sprime = _sprime(text, params)
    equal = PropertyReport('stage1_equal', checked_pairs=1)
    expected = direct_stage1(text, sk, tau)
    if sprime != expected:
        equal.add(streamed=len(sprime), direct=len(expected))
    inner = 3 * tau // 4
    return [
        equal,
        check_property_a(text, sprime, inner),
        check_property_b(text, sprime, inner),
        check_property_c(text, sprime, tau),
        check_c_converse(text, sprime, tau, margin=inner),
    ]


def run_letters(instance, options):
    """Close letters differ, equal contexts give equal letters, M counts match."""
    text, tau = instance.text, instance.tau
    if text.n > LETTER_TEXT_LIMIT:
        return []
    params = _params(instance, options)
    R, _ = build_R(text, params)
    positions = R.origin.tolist()
    letters = R.letters

    distinct = PropertyReport('letters_distinct')
    reach = tau // 32
    for x, p in enumerate(positions):
        y = x + 1
        while y < len(positions) and positions[y] - p <= reach:
            distinct.checked_pairs += 1
            if letters[x] == letters[y]:
                distinct.add(p=p, q=positions[y])
            y += 1

    local = PropertyReport('letters_local')
    span = 7 * tau // 8
    member = set(positions)
    groups = defaultdict(list)
    for x, p in enumerate(positions):
        pattern = tuple(d for d in range(span + 1) if p + d in member)
        groups[(text.substring(p, span + 1), pattern)].append(x)
    for members in groups.values():
        for x in members[1:]:
            local.checked_pairs += 1
            if letters[x] != letters[members[0]]:
                local.add(p=positions[members[0]], q=positions[x])

    counts = PropertyReport('m_counts')
    _check_counts(counts, R, positions, tau)
    return [distinct, local, counts]


def _check_counts(report, R, positions, tau):
    arr = np.asarray(positions, dtype=np.int64)
    for j in range(R.M.shape[1]):
        expected = np.searchsorted(arr, arr + (tau >> j), side='right') - np.arange(1, len(arr) + 1)
        report.checked_pairs += 1
        bad = np.flatnonzero(R.M[:, j] != expected)
        if bad.size:
            report.add(j=j, index=int(bad[0]), stored=int(R.M[bad[0], j]), recount=int(expected[bad[0]]))


def run_recompression(instance, options):
    """
    Per lambda4: the round bound at the configured slack, then the shrink
    and M-update contracts at a slack low enough that the loop actually runs.
    """
    text = instance.text
    slack = options.get('shrink_slack')
    claim_slack = config.SHRINK_SLACK if slack is None else slack
    run_slack = RECOMPRESSION_SLACK if slack is None else slack
    lambda3 = options.get('lambda3') or 2
    reports = []
    for lambda4 in (8, 10):
        rounds = PropertyReport(f'rounds_l{lambda4}')
        params = make_params(text.n, instance.tau, 'desk', lambda3=lambda3, lambda4=lambda4,
                             symbol_bits=text.w, shrink_slack=claim_slack)
        try:
            R, _ = build_R(text, params)
            _, _, _, levels = recompress_loop(R, params)
            for outcome in levels:
                rounds.checked_pairs += 1
                if not outcome.finished:
                    rounds.add(**outcome.as_dict())
        except RecompressionStall as e:
            rounds.add(slack=claim_slack, message=str(e).replace(' ', '_'))
        reports.append(rounds)

        params = make_params(text.n, instance.tau, 'desk', lambda3=lambda3, lambda4=lambda4,
                             symbol_bits=text.w, shrink_slack=run_slack)
        shrink = PropertyReport(f'shrink_l{lambda4}')
        counts = PropertyReport(f'm_update_l{lambda4}')

        def observe(R, report, shrink=shrink, counts=counts, tau=params.tau):
            shrink.checked_pairs += 1
            if 4 * report.d_after > 3 * report.d_before:
                shrink.add(j=report.j, before=report.d_before, after=report.d_after)
            _check_counts(counts, R, R.origin.tolist(), tau)

        try:
            R, _ = build_R(text, params)
            _, _, steps, levels = recompress_loop(R, params, observer=observe)
        except InvariantBreach as e:
            reports.append(_invariant(e))
        else:
            shrink.note('steps', len(steps))
            for outcome in levels:
                shrink.note(outcome.status)
        reports.extend([shrink, counts])
    return reports


def run_final(instance, options):
    text, tau = instance.text, instance.tau
    params = _params(instance, options)
    direct = build_partition(text, params, replay=False)
    replayed = build_partition(text, params, replay=True)
    sstar = direct.sstar.positions

    same = PropertyReport('determinism', checked_pairs=2)
    if replayed.sstar.positions != sstar:
        same.add(direct=len(sstar), replayed=len(replayed.sstar.positions))
    if replayed.mask != direct.mask:
        same.add(mask='differs')

    size = PropertyReport('size_bound', checked_pairs=1)
    if len(sstar) * tau > text.n << SIZE_EXPONENT:
        size.add(size=len(sstar), bound=(text.n << SIZE_EXPONENT) // tau)

    exercised = PropertyReport('exercised')
    exercised.note('phases', params.phase_count)
    exercised.note('steps', len(direct.steps))
    exercised.note('removed', sum(step.removed for step in direct.steps))
    logger.info("%s: |S*|=%d ratio=%.3f", instance.name, len(sstar), len(sstar) * tau / text.n)
    return [
        check_property_a(text, sstar, tau),
        check_property_b(text, sstar, tau),
        check_property_c(text, sstar, tau),
        check_c_converse(text, sstar, tau),
        same,
        size,
        exercised,
    ]


def summarize_final(results, instances, options):
    """The corpus must reach the refinement phases and the shrink steps."""
    coverage = PropertyReport('coverage', checked_pairs=2)
    totals = defaultdict(int)
    for _, report in results:
        if report.property == 'exercised':
            for key, amount in report.notes.items():
                totals[key] += amount
    lambda3 = options.get('lambda3') or 2
    if totals['phases'] == 0 and any(phase_count_for(i.tau, lambda3) for i in instances):
        coverage.add(missing='phases')
    slack = options.get('shrink_slack')
    if totals['steps'] == 0 and instances and (slack is None or slack < config.STRICT_SHRINK_SLACK):
        coverage.add(missing='steps')
    return [coverage]


def run_lce(instance, options):
    text, tau = instance.text, instance.tau
    params = _params(instance, options)
    sstar = build_partition(text, params).sstar.positions
    index = build_lce_index(text, sstar, tau)
    exact = PropertyReport('lce_exact')
    cost = PropertyReport('lce_cost')
    rng = Lcg(options.get('seed', 0) + text.n)
    for _ in range(options.get('queries', 2000)):
        p, q = rng.below(text.n), rng.below(text.n)
        answer = index.query(p, q)
        exact.checked_pairs += 1
        if answer != naive_lce(text, p, q):
            exact.add(p=p, q=q, answer=answer, naive=naive_lce(text, p, q))
        spent = index.last_cost
        cost.checked_pairs += 1
        if spent['depth'] > 1 or (not spent['fallback'] and spent['reads'] > QUERY_COST_FACTOR * (tau + 1)):
            cost.add(p=p, q=q, reads=spent['reads'], depth=spent['depth'])
    return [exact, cost]


def periodic_suffixes(text, tau, limit):
    """Positions whose stretch [i+tau .. i+3tau] has period at most tau/4."""
    out = []
    step = max(1, tau // 4)
    for i in range(0, max(0, text.n - 3 * tau - 1), step):
        if minimal_period(text.symbols[i + tau:i + 3 * tau + 1]) <= tau // 4:
            out.append(i)
            if len(out) >= limit:
                break
    return out


def run_sst(instance, options):
    text, tau = instance.text, instance.tau
    params = _params(instance, options)
    sstar = build_partition(text, params).sstar.positions
    core = PropertyReport('sst_core', checked_pairs=1)
    if sstar and not same_tree(text, build_sparse_tree(text, sstar, tau), oracle_trie(text, sstar)):
        core.add(positions=len(sstar))

    count = options.get('suffixes', 32)
    rng = Lcg(options.get('seed', 0) + 3 * text.n)
    chosen = {rng.below(text.n) for _ in range(count)}
    chosen.update(periodic_suffixes(text, tau, count))
    suffixes = sorted(chosen)

    index = build_lce_index(text, sstar, tau)
    user = PropertyReport('sst_user', checked_pairs=1)
    tree = build_user_sst(text, suffixes, sstar, tau, index=index)
    if not same_tree(text, tree, oracle_trie(text, suffixes)):
        user.add(suffixes=len(suffixes))
    tuples = suffix_tuples(text, suffixes, index)
    unanchored = sum(1 for value in tuples.values() if value is not None and not value.anchored)
    logger.debug("%s: %d of %d suffixes unanchored", instance.name, unanchored, len(suffixes))
    return [core, user]


RUNNERS = {
    'phases': run_phases,
    'stage1': run_stage1,
    'letters': run_letters,
    'recompression': run_recompression,
    'final': run_final,
    'lce': run_lce,
    'sst': run_sst,
}

SUMMARIES = {
    'final': summarize_final,
}


def run_level(level, instances, **options):
    """
    Run one verify level over a corpus.

    Returns:
        List of (instance name, PropertyReport); corpus-wide reports come
        last under the name 'corpus'
    """
    if level not in RUNNERS:
        raise ValueError(f"unknown verify level '{level}'")
    runner = RUNNERS[level]
    results = []
    for instance in instances:
        try:
            reports = runner(instance, options)
        except InvariantBreach as e:
            reports = [_invariant(e)]
        for report in reports:
            results.append((instance.name, report))
    if level in SUMMARIES:
        for report in SUMMARIES[level](results, instances, options):
            results.append(('corpus', report))
    return results

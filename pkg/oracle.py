"""
TauSet - Brute-force references
Direct evaluations of every definition the pipeline relies on. No attempt at
speed beyond grouping candidate pairs; intended for texts of a few thousand
symbols.
"""

import bisect
from collections import defaultdict
from dataclasses import dataclass, field

from bitarray import bitarray

from bitops import INF, vbit
from errors import PipelineOrderError
from sst_core import SparseTree, SuffixLce, assemble_tree
from text_model import ParamEnv, Text

MAX_WITNESSES = 50


@dataclass
class PropertyReport:
    property: str
    violations: list = field(default_factory=list)
    checked_pairs: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def holds(self):
        return not self.violations

    def add(self, **witness):
        if len(self.violations) < MAX_WITNESSES:
            self.violations.append(witness)

    def note(self, key, amount=1):
        """Count something the check exercised without judging it."""
        self.notes[key] = self.notes.get(key, 0) + amount

    def lines(self):
        out = []
        for witness in self.violations:
            fields = ' '.join(f"{k}={v}" for k, v in witness.items())
            out.append(f"property={self.property} {fields}")
        return out


def naive_lce(text, p, q):
    if not (0 <= p < text.n and 0 <= q < text.n):
        raise IndexError(f"positions ({p}, {q}) outside [0..{text.n})")
    return text.match_length(p, q)


def naive_period(symbols):
    """Smallest p >= 1 with symbols[i] == symbols[i - p] for all valid i."""
    seq = list(symbols)
    for p in range(1, len(seq)):
        if all(seq[i] == seq[i - p] for i in range(p, len(seq))):
            return p
    return len(seq)


def has_period_at_most(symbols, bound):
    seq = list(symbols)
    for p in range(1, min(bound, len(seq)) + 1):
        if all(seq[i] == seq[i - p] for i in range(p, len(seq))):
            return True
    return len(seq) <= bound


def _membership(n, positions):
    bits = bitarray(n)
    bits.setall(0)
    for p in positions:
        bits[p] = 1
    return bits


def check_property_a(text, S, tau):
    """Equal (2tau+1)-windows around i, j in [tau..n-tau) imply equal membership."""
    report = PropertyReport('a')
    member = _membership(text.n, S)
    groups = defaultdict(list)
    for i in range(tau, text.n - tau):
        groups[text.substring(i - tau, 2 * tau + 1)].append(i)
    for members in groups.values():
        if len(members) < 2:
            continue
        report.checked_pairs += len(members) - 1
        inside = [i for i in members if member[i]]
        outside = [i for i in members if not member[i]]
        if inside and outside:
            i, j = sorted((inside[0], outside[0]))
            report.add(i=i, j=j)
    return report


def check_property_b(text, S, tau):
    """Equal right contexts of length l+1 at i, j in S imply equal membership on [0..l-tau)."""
    report = PropertyReport('b')
    S = sorted(S)
    member = _membership(text.n, S)
    lce = SuffixLce(text.symbols)
    groups = defaultdict(list)
    for i in S:
        groups[text.substring(i, tau + 1)].append(i)
    for members in groups.values():
        for x, i in enumerate(members):
            for j in members[x + 1:]:
                report.checked_pairs += 1
                span = lce.lce(i, j) - 1 - tau
                if span <= 0:
                    continue
                diff = member[i:i + span] ^ member[j:j + span]
                d = diff.find(1)
                if d >= 0:
                    report.add(i=i, j=j, d=d)
    return report


def check_property_c(text, S, tau):
    """Consecutive positions farther apart than tau enclose a substring of period <= tau/4."""
    report = PropertyReport('c')
    S = sorted(S)
    for i, j in zip(S, S[1:]):
        if j - i <= tau:
            continue
        report.checked_pairs += 1
        if not has_period_at_most(text.symbols[i:j + 1], tau // 4):
            report.add(i=i, j=j, period=naive_period(text.symbols[i:j + 1]))
    return report


def check_c_converse(text, S, tau, margin=None):
    """
    Substrings with period <= tau/4 hold no position of S at distance >= margin
    from both of their ends.

    Args:
        margin: Integer margin; defaults to tau
    """
    report = PropertyReport('c_converse')
    if margin is None:
        margin = tau
    S = sorted(S)
    s = text.symbols
    n = text.n
    for p in range(1, tau // 4 + 1):
        x = p
        while x < n:
            if s[x] != s[x - p]:
                x += 1
                continue
            start = x
            while x < n and s[x] == s[x - p]:
                x += 1
            run_lo, run_hi = start - p, x - 1
            lo, hi = run_lo + margin, run_hi - margin
            if lo > hi:
                continue
            report.checked_pairs += 1
            k = bisect.bisect_left(S, lo)
            if k < len(S) and S[k] <= hi:
                report.add(period=p, start=run_lo, end=run_hi, position=S[k])
    return report


def check_local_sparsity(S, k, n):
    """|S & [i..i')| <= 64 * ceil((i'-i) / 2^k) for every window."""
    report = PropertyReport('sparsity')
    S = sorted(S)
    step = 1 << k
    for x, a in enumerate(S):
        c = 1
        while a + (c - 1) * step < n:
            count = bisect.bisect_left(S, a + c * step) - x
            report.checked_pairs += 1
            if count > 64 * c:
                report.add(start=a, length=c * step, count=count)
                break
            if x + 64 * c >= len(S):
                break
            c += 1
    return report


def oracle_trie(text, positions):
    """Compacted trie by naive suffix sorting and adjacent naive LCE."""
    positions = list(positions)
    if len(set(positions)) != len(positions):
        raise PipelineOrderError("duplicate suffix positions")
    s = text.symbols
    order = sorted(positions, key=lambda p: s[p:])
    lcps = [text.match_length(a, b) for a, b in zip(order, order[1:])]
    return assemble_tree(text.n, order, lcps)


def same_tree(text, left, right):
    return left.canonical(text) == right.canonical(text)


def window_value(text, j, span):
    """Integer whose cw-bit digit i is the code of s[j + i], i in [0..span]."""
    cw = text.code_width
    value = 0
    for i in range(span, -1, -1):
        value = (value << cw) | (text.read(j + i) + 1)
    return value


def refine_rule(positions, values, repeats, gaps_ok):
    """Kept indices given per-index v, R flags and the small-gap flags."""
    m = len(positions)
    kept = []
    for h in range(m):
        before = h > 0 and gaps_ok[h - 1]
        after = gaps_ok[h]
        if not before or not after:
            kept.append(h)
            continue
        r_prev = h > 0 and repeats[h - 1]
        if (not r_prev and repeats[h] and h + 2 < m
                and repeats[h + 1] and repeats[h + 2]):
            kept.append(h)
            continue
        if repeats[h] and not (h + 1 < m and repeats[h + 1]):
            kept.append(h)
            continue
        v_prev = values[h - 1] if h > 0 else INF
        v_next = values[h + 1] if h + 1 < m else INF
        if INF > v_prev > values[h] and values[h] < v_next:
            kept.append(h)
    return kept


def direct_refine(text, params):
    """All S_k for k in [0..phase_count], each as a sorted list."""
    levels = [list(range(text.n))]
    for k in range(1, params.phase_count + 1):
        positions = levels[-1]
        values, repeats, gaps_ok = direct_values(text, positions, k)
        kept = refine_rule(positions, values, repeats, gaps_ok)
        levels.append([positions[h] for h in kept])
    return levels


def phase_values(text, positions, k):
    """(v', v, R, gap flags) per index for one phase over the given S_{k-1}."""
    half, span = 1 << (k - 1), 1 << k
    m = len(positions)
    gaps_ok = [h + 1 < m and positions[h + 1] - positions[h] <= half for h in range(m)]
    prime = [INF] * m
    repeats = [False] * m
    for h in range(m):
        if gaps_ok[h]:
            a = window_value(text, positions[h], span)
            b = window_value(text, positions[h + 1], span)
            if a == b:
                repeats[h] = True
            else:
                prime[h] = vbit(a, b)
    layer = prime
    for _ in range(3):
        layer = [vbit(layer[h], layer[h + 1]) if h + 1 < m and layer[h] != layer[h + 1] else INF
                 for h in range(m)]
    return prime, layer, repeats, gaps_ok


def direct_values(text, positions, k):
    """(v, R, gap flags) for one phase over the given S_{k-1}."""
    _, values, repeats, gaps_ok = phase_values(text, positions, k)
    return values, repeats, gaps_ok


def _runs(flags):
    """Maximal (first, last) index ranges where flags holds."""
    out = []
    h, m = 0, len(flags)
    while h < m:
        if not flags[h]:
            h += 1
            continue
        first = h
        while h + 1 < m and flags[h + 1]:
            h += 1
        out.append((first, h))
        h += 1
    return out


def check_repeat_regions(text, positions, kept, k):
    """
    Every maximal run p..q of repeat indices in phase k: the covered text
    has the period of its first (2^k+1)-window, at most 2^(k-1); the phase
    keeps index q, and index p exactly when the run has three or more
    indices or follows a gap wider than 2^(k-1).

    Args:
        positions: S_{k-1}, sorted
        kept: S_k as produced for those positions
    """
    report = PropertyReport('repeat_regions')
    positions = list(positions)
    _, _, repeats, gaps_ok = phase_values(text, positions, k)
    half, span = 1 << (k - 1), 1 << k
    member = set(kept)
    s = text.symbols
    for p, q in _runs(repeats):
        report.checked_pairs += 1
        start, end = positions[p], positions[q + 1] + span
        window = naive_period(s[start:start + span + 1])
        period = naive_period(s[start:end + 1])
        if period != window or period > half:
            report.add(first=start, last=positions[q + 1], period=period, window=window)
        expected = {positions[q]}
        if q - p >= 2 or p == 0 or not gaps_ok[p - 1]:
            expected.add(positions[p])
        actual = {positions[h] for h in range(p, q + 1) if positions[h] in member}
        if actual != expected:
            report.add(first=start, last=positions[q], kept=len(actual), expected=len(expected))
    return report


def check_value_structure(text, positions, k):
    """
    Every maximal run p..q of indices with finite v' in phase k: v is finite
    on [p..q-3], infinite on the last three, and no two adjacent finite values agree.
    """
    report = PropertyReport('value_structure')
    positions = list(positions)
    prime, values, _, _ = phase_values(text, positions, k)
    for p, q in _runs([x != INF for x in prime]):
        report.checked_pairs += 1
        for h in range(p, q + 1):
            finite = values[h] != INF
            if h <= q - 3 and not finite:
                report.add(position=positions[h], index=h - p, run=q - p + 1, value='inf')
            elif h > q - 3 and finite:
                report.add(position=positions[h], index=h - p, run=q - p + 1, value=values[h])
            elif finite and h < q and values[h] == values[h + 1]:
                report.add(position=positions[h], index=h - p, run=q - p + 1, repeated=values[h])
    return report


def check_value_bound(text, positions, k, lambda3):
    """Every finite v of phase k is below 2 * lambda3 + 3."""
    report = PropertyReport('value_bound')
    _, values, _, _ = phase_values(text, list(positions), k)
    bound = 2 * lambda3 + 3
    for h, value in enumerate(values):
        if value == INF:
            continue
        report.checked_pairs += 1
        if value >= bound:
            report.add(position=positions[h], value=value, bound=bound)
    return report


def direct_stage1(text, S, tau):
    """S minus every h with i < h <= j, i, j in S, j - i <= tau/4 and equal (tau/2+1)-windows."""
    S = sorted(S)
    reach, half = tau // 4, tau // 2
    removed = set()
    for x, i in enumerate(S):
        window = text.substring(i, half + 1)
        for y in range(x + 1, len(S)):
            j = S[y]
            if j - i > reach:
                break
            if text.substring(j, half + 1) == window:
                removed.update(S[x + 1:y + 1])
    return [h for h in S if h not in removed]

"""
TauSet - Sparse suffix tree for chosen suffixes
Sorts arbitrary suffixes by short tuples built against the anchors of a
tau-partitioning set, then assembles the tree from adjacent LCE queries.
"""

import logging
from dataclasses import dataclass
from functools import cmp_to_key

from errors import InvariantBreach, PipelineOrderError
from lce_index import LceIndex, build_lce_index
from sst_core import SparseTree, assemble_tree, rank_windows, window_rows
from text_model import Text

logger = logging.getLogger(__name__)


def minimal_period(symbols):
    """Smallest period of a non-empty sequence (length minus its longest border)."""
    seq = list(symbols)
    m = len(seq)
    if m == 0:
        raise ValueError("period of an empty range")
    border = [0] * m
    k = 0
    for i in range(1, m):
        while k > 0 and seq[i] != seq[k]:
            k = border[k - 1]
        if seq[i] == seq[k]:
            k += 1
        border[i] = k
    return m - border[-1]


@dataclass(frozen=True)
class SuffixTuple:
    ell: int
    r: int
    d: int
    rt: int
    rbar: int

    @property
    def anchored(self):
        return self.d == 0

    def key(self):
        return (self.r, self.d, self.rt, self.rbar)


def _naive_compare(text, a, b):
    ell = text.match_length(a, b)
    return -1 if text.read(a + ell) < text.read(b + ell) else 1


def suffix_tuples(text, suffixes, index):
    """
    Sort keys for the chosen suffixes.

    Returns:
        dict position -> SuffixTuple, or None when the suffix has no usable
        anchor and must be compared directly
    """
    tau = index.tau
    n = text.n
    positions = list(suffixes)
    ranks = rank_windows(window_rows(text, positions, 4 * tau + 1)).tolist() if positions else []
    leaf_rank = index.tree.leaf_ranks() if index.tree is not None else {}

    pending = []
    result = {}
    for ell, i in enumerate(positions):
        found = index.successor(i + tau)
        if found is None:
            result[i] = None
            continue
        k, anchor = found
        if anchor <= i + 3 * tau:
            result[i] = SuffixTuple(ell, ranks[ell], 0, 0, leaf_rank[anchor])
            continue
        if k == 0:
            result[i] = None
            continue
        period = minimal_period(text.symbols[i + tau:anchor + 1])
        if period > tau // 4:
            raise InvariantBreach(f"gap before anchor {anchor} of suffix {i} has period {period}")
        t = anchor + 1
        while t <= n and text.read(t) == text.read(t - period):
            t += 1
        if not anchor < t <= anchor + tau:
            raise InvariantBreach(f"run through anchor {anchor} breaks at {t}, beyond tau")
        span = t - i - n
        d = span if text.read(t) < text.read(t - period) else -span
        pending.append((ell, i, t, d, leaf_rank[anchor]))

    if pending:
        tilde = rank_windows(window_rows(text, [t for _, _, t, _, _ in pending], tau + 1)).tolist()
        for (ell, i, t, d, rbar), rt in zip(pending, tilde):
            result[i] = SuffixTuple(ell, ranks[ell], d, rt, rbar)
    return result


def sort_suffixes(text, suffixes, index):
    """Chosen suffixes in lexicographic order."""
    tuples = suffix_tuples(text, suffixes, index)
    if all(value is not None for value in tuples.values()):
        return sorted(tuples, key=lambda p: tuples[p].key())

    def compare(a, b):
        ta, tb = tuples[a], tuples[b]
        if ta is not None and tb is not None:
            return -1 if ta.key() < tb.key() else 1
        return _naive_compare(text, a, b)

    return sorted(tuples, key=cmp_to_key(compare))


def build_user_sst(text, suffixes, sstar, tau,
                   index=None):
    """
    Sparse suffix tree over arbitrary suffixes.

    Args:
        text: Input text
        suffixes: Distinct positions in [0..n)
        sstar: tau-partitioning set the tuples are anchored on
        tau: Its parameter
        index: Prebuilt LCE index over sstar (built when omitted)

    Returns:
        SparseTree whose leaves are exactly the chosen suffixes
    """
    suffixes = list(suffixes)
    if len(set(suffixes)) != len(suffixes):
        raise PipelineOrderError("duplicate suffix positions")
    for p in suffixes:
        if not 0 <= p < text.n:
            raise IndexError(f"suffix {p} outside [0..{text.n})")
    if index is None:
        index = build_lce_index(text, sstar, tau)

    order = sort_suffixes(text, suffixes, index)
    lcps = [index.query(a, b) for a, b in zip(order, order[1:])]
    logger.debug("user tree: %d suffixes, tau=%d", len(order), tau)
    return assemble_tree(text.n, order, lcps)

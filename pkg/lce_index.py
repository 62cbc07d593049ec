"""
TauSet - LCE index
Sparse suffix tree over S* plus a successor table sampled every tau
positions. A query scans O(tau) symbols and finishes with one LCA lookup,
jumping over a shared periodic stretch at most once.
"""

import bisect
import logging

import numpy as np

import config
from errors import InvariantBreach
from sst_core import SparseTree, build_sparse_tree
from text_model import Text

logger = logging.getLogger(__name__)


class LceIndex:
    """
    Answers lce(p, q) for arbitrary positions.

    N[i] is the smallest position of S* at or after i*tau, or n when there is
    none, and K[i] is its index in S*. `last_cost` holds the symbol reads and
    recursion depth of the most recent query.
    """

    def __init__(self, text, sstar, tau, tree):
        self.text = text
        self.sstar = list(sstar)
        self.tau = tau
        self.n = text.n
        self.tree = tree
        blocks = -(-self.n // tau)
        self.K = np.searchsorted(np.asarray(self.sstar, dtype=np.int64),
                                 np.arange(blocks + 1, dtype=np.int64) * tau)
        padded = np.append(np.asarray(self.sstar, dtype=np.int64), self.n)
        self.N = padded[self.K[:blocks]]
        self.last_cost = {'reads': 0, 'depth': 0, 'fallback': False}
        self.queries = 0
        self.total_reads = 0
        self.max_reads = 0
        self.fallbacks = 0

    def successor(self, x):
        """(index into S*, position) of the smallest S* position >= x, or None."""
        if x >= self.n:
            return None
        block = x // self.tau
        if self.N[block] >= x:
            k = int(self.K[block])
        else:
            # x lies past the first anchor of its block
            k = bisect.bisect_left(self.sstar, x, int(self.K[block]), int(self.K[block + 1]))
        if k >= len(self.sstar):
            return None
        return k, self.sstar[k]

    def _scan(self, p, q, cap, cost):
        ell = self.text.match_length(p, q, cap)
        cost['reads'] += min(ell + 1, cap)
        return ell

    def query(self, p, q):
        if not (0 <= p < self.n and 0 <= q < self.n):
            raise IndexError(f"positions ({p}, {q}) outside [0..{self.n})")
        cost = {'reads': 0, 'depth': 0, 'fallback': False}
        if p == q:
            answer = self.n - p
        else:
            answer = self._query(p, q, cost)
        self.last_cost = cost
        self.queries += 1
        self.total_reads += cost['reads']
        self.max_reads = max(self.max_reads, cost['reads'])
        self.fallbacks += cost['fallback']
        return answer

    def _query(self, p, q, cost):
        tau = self.tau
        ps, qs = self.successor(p + tau), self.successor(q + tau)
        if ps is None or qs is None or self.tree is None:
            cost['fallback'] = True
            return self._scan(p, q, self.n, cost)
        (pk, p_anchor), (qk, q_anchor) = ps, qs
        gp, gq = p_anchor - p, q_anchor - q

        if gp <= 2 * tau or gq <= 2 * tau:
            cap = 3 * tau + 1
            ell = self._scan(p, q, cap, cost)
            if ell < cap:
                return ell
            if gp != gq:
                raise InvariantBreach(f"anchors of {p} and {q} are not aligned ({gp} vs {gq})")
            return gp + self.tree.lca_lce(p_anchor, q_anchor)

        cap = 2 * tau + 1
        ell = self._scan(p, q, cap, cost)
        if ell < cap:
            return ell
        if pk == 0 or qk == 0:
            # no position of S* before the periodic stretch
            cost['fallback'] = True
            return cap + self._scan(p + cap, q + cap, self.n, cost)
        if cost['depth'] >= 1:
            raise InvariantBreach(f"second periodicity jump at ({p}, {q})")
        jump = min(gp, gq) - tau
        if config.DEBUG_CHECKS and self.text.match_length(p, q, jump) < jump:
            raise InvariantBreach(f"periodicity jump of {jump} at ({p}, {q}) is unsound")
        cost['depth'] += 1
        return jump + self._query(p + jump, q + jump, cost)

    def stats(self):
        return {
            'queries': self.queries,
            'total_reads': self.total_reads,
            'max_reads': self.max_reads,
            'fallbacks': self.fallbacks,
            'positions': len(self.sstar),
        }


def build_lce_index(text, sstar, tau):
    """
    Build the LCE index over a tau-partitioning set.

    Args:
        text: Input text
        sstar: Sorted positions of S*
        tau: Partitioning parameter of S*

    Returns:
        LceIndex (queries fall back to scanning when S* is empty)
    """
    sstar = list(sstar)
    tree = build_sparse_tree(text, sstar, tau) if sstar else None
    if not sstar:
        logger.warning("empty partitioning set for n=%d; queries will scan", text.n)
    logger.debug("lce index: %d anchors, tau=%d", len(sstar), tau)
    return LceIndex(text, sstar, tau, tree)


def lce_query(index, p, q):
    return index.query(p, q)

"""
TauSet - Sparse suffix tree core
Suffix array and LCP primitives, range-minimum tables, and the sparse suffix
tree built from a position set with the local-consistency and
forward-synchronisation properties.
"""

import logging

import numpy as np

import config
from errors import InvariantBreach, PipelineOrderError, PositionNotIndexed
from text_model import SENTINEL, Text

logger = logging.getLogger(__name__)

RANK_METHODS = ('lexsort', 'tuples')


# =============================================================================
# SUFFIX ARRAY / LCP / RANGE MINIMUM
# =============================================================================

def suffix_array(seq):
    """Suffix array of an integer sequence by prefix doubling. Shorter suffixes sort first."""
    s = np.asarray(seq, dtype=np.int64)
    n = len(s)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    _, rank = np.unique(s, return_inverse=True)
    rank = rank.reshape(-1).astype(np.int64)
    sa = np.argsort(rank, kind='stable')
    k = 1
    while rank.max() < n - 1:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[:n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        first_sorted = rank[sa]
        second_sorted = second[sa]
        fresh = np.empty(n, dtype=bool)
        fresh[0] = True
        fresh[1:] = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = np.cumsum(fresh) - 1
        k *= 2
    return sa


def lcp_array(seq, sa):
    """Kasai LCP: lcp[r] = LCP(suffix sa[r-1], suffix sa[r]), lcp[0] = 0."""
    s = list(seq)
    order = [int(x) for x in sa]
    n = len(s)
    rank = [0] * n
    for r, p in enumerate(order):
        rank[p] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = order[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return lcp


class RangeMin:
    """Sparse table answering min over an inclusive index range in O(1)."""

    def __init__(self, values, dtype=np.int64):
        base = np.asarray(values, dtype=dtype)
        self.size = len(base)
        self._levels = [base]
        k = 1
        while (1 << k) <= self.size:
            prev = self._levels[-1]
            half = 1 << (k - 1)
            self._levels.append(np.minimum(prev[:-half], prev[half:]))
            k += 1

    def query(self, lo, hi):
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        k = (hi - lo + 1).bit_length() - 1
        level = self._levels[k]
        a = level[lo]
        b = level[hi - (1 << k) + 1]
        return int(a if a < b else b)


class SuffixLce:
    """Exact LCE over one sequence via suffix array, LCP and range minimum."""

    def __init__(self, seq):
        self.seq = list(seq)
        self.n = len(self.seq)
        self.sa = suffix_array(self.seq)
        self.rank = np.empty(self.n, dtype=np.int64)
        self.rank[self.sa] = np.arange(self.n, dtype=np.int64)
        self._rmq = RangeMin(lcp_array(self.seq, self.sa), dtype=np.int32)

    def lce(self, p, q):
        if p == q:
            return self.n - p
        r1, r2 = int(self.rank[p]), int(self.rank[q])
        if r1 > r2:
            r1, r2 = r2, r1
        return self._rmq.query(r1 + 1, r2)


def rank_windows(rows, method='lexsort'):
    """
    Dense lexicographic ranks of the rows of a 2-D integer array.

    Args:
        rows: One window per row
        method: 'lexsort' (numpy column sort) or 'tuples' (comparison sort)

    Returns:
        int64 array, equal rows share a rank, ranks start at 0
    """
    count = rows.shape[0]
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if method == 'lexsort':
        order = np.lexsort(rows.T[::-1])
    elif method == 'tuples':
        keys = [tuple(row) for row in rows.tolist()]
        order = np.asarray(sorted(range(count), key=keys.__getitem__), dtype=np.int64)
    else:
        raise ValueError(f"unknown ranking method '{method}'")
    ordered = rows[order]
    fresh = np.ones(count, dtype=bool)
    if count > 1:
        fresh[1:] = np.any(ordered[1:] != ordered[:-1], axis=1)
    ranks = np.empty(count, dtype=np.int64)
    ranks[order] = np.cumsum(fresh) - 1
    return ranks


def window_rows(text, starts, length):
    """Matrix whose row h is text[starts[h] .. starts[h]+length-1], sentinel padded."""
    padded = np.concatenate([text.array, np.full(length, SENTINEL, dtype=np.int64)])
    idx = np.asarray(starts, dtype=np.int64)[:, None] + np.arange(length, dtype=np.int64)
    return padded[idx]


# =============================================================================
# SPARSE TREE
# =============================================================================

class SparseTree:
    """
    Compacted trie over chosen suffixes of a text of length text_len.

    Node 0 is the root. depth[v] is the string depth; a leaf for suffix p has
    depth text_len - p + 1 (its label ends with the sentinel). Edge labels are
    (rep[v] + depth[parent], depth[v] - depth[parent]) references into the text.
    """

    def __init__(self, text_len):
        self.text_len = text_len
        self.parent = [-1]
        self.depth = [0]
        self.rep = [0]
        self.leaf_pos = [-1]
        self.children = [[]]
        self.leaf_of = {}
        self._first = None
        self._rmq = None

    def _add(self, parent, depth, rep, leaf=-1):
        v = len(self.parent)
        self.parent.append(parent)
        self.depth.append(depth)
        self.rep.append(rep)
        self.leaf_pos.append(leaf)
        self.children.append([])
        if leaf >= 0:
            self.leaf_of[leaf] = v
        return v

    @property
    def node_count(self):
        return len(self.parent)

    def edge(self, v):
        if v == 0:
            return (0, 0)
        up = self.depth[self.parent[v]]
        return (self.rep[v] + up, self.depth[v] - up)

    def preorder(self):
        order = []
        stack = [0]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return order

    def leaves(self):
        """Leaf suffix positions left to right."""
        return [self.leaf_pos[v] for v in self.preorder() if self.leaf_pos[v] >= 0]

    def leaf_ranks(self):
        return {p: r for r, p in enumerate(self.leaves())}

    def _prepare_lca(self):
        count = self.node_count
        first = [-1] * count
        keys = []
        cursor = [0] * count
        stack = [0]
        first[0] = 0
        keys.append(self.depth[0] * count)
        while stack:
            v = stack[-1]
            if cursor[v] < len(self.children[v]):
                c = self.children[v][cursor[v]]
                cursor[v] += 1
                first[c] = len(keys)
                keys.append(self.depth[c] * count + c)
                stack.append(c)
            else:
                stack.pop()
                if stack:
                    u = stack[-1]
                    keys.append(self.depth[u] * count + u)
        self._first = first
        self._rmq = RangeMin(keys)

    def _leaf(self, p):
        try:
            return self.leaf_of[p]
        except KeyError:
            raise PositionNotIndexed(p) from None

    def lca_lce(self, p, q):
        """Longest common prefix of the suffixes at p and q (both leaves)."""
        u, v = self._leaf(p), self._leaf(q)
        if p == q:
            return self.text_len - p
        if self._rmq is None:
            self._prepare_lca()
        a, b = self._first[u], self._first[v]
        if a > b:
            a, b = b, a
        return self._rmq.query(a, b) // self.node_count

    def serialize(self):
        """Pre-order lines: node <id> parent <pid> edge <start> <len> [leaf <pos>]."""
        order = self.preorder()
        ids = {v: i for i, v in enumerate(order)}
        lines = []
        for v in order:
            start, length = self.edge(v)
            pid = ids[self.parent[v]] if v else -1
            line = f"node {ids[v]} parent {pid} edge {start} {length}"
            if self.leaf_pos[v] >= 0:
                line += f" leaf {self.leaf_pos[v]}"
            lines.append(line)
        return lines

    def canonical(self, text):
        """Pre-order (tree depth, label symbols, leaf) triples; label content, not offsets."""
        out = []
        stack = [(0, 0)]
        while stack:
            v, level = stack.pop()
            start, length = self.edge(v)
            out.append((level, text.substring(start, length), self.leaf_pos[v]))
            stack.extend((c, level + 1) for c in reversed(self.children[v]))
        return out


def assemble_tree(text_len, order, adjacent_lcps):
    """
    Compacted trie from suffixes in lexicographic order.

    Args:
        text_len: Length of the underlying text
        order: Suffix start positions, sorted lexicographically
        adjacent_lcps: adjacent_lcps[i-1] = LCP(order[i-1], order[i]) for i >= 1
    """
    tree = SparseTree(text_len)
    stack = [0]
    for idx, p in enumerate(order):
        if idx > 0:
            ell = adjacent_lcps[idx - 1]
            last = None
            while tree.depth[stack[-1]] > ell:
                last = stack.pop()
            top = stack[-1]
            if tree.depth[top] < ell:
                mid = tree._add(top, ell, tree.rep[last])
                tree.children[top][-1] = mid
                tree.children[mid].append(last)
                tree.parent[last] = mid
                stack.append(mid)
        top = stack[-1]
        leaf = tree._add(top, text_len - p + 1, p, leaf=p)
        tree.children[top].append(leaf)
        stack.append(leaf)
    return tree


def build_sparse_tree(text, positions, tau, method='lexsort',
                      debug=None):
    """
    Sparse suffix tree over the suffixes at `positions`.

    The positions must be sorted and satisfy local consistency and forward
    synchronisation at tau. Chunks of length 2*tau+1 starting at j_k + d*tau
    are ranked, the rank string gets a suffix array, and rank-LCPs between
    adjacent kept suffixes are turned into text LCPs by one bounded scan.

    Args:
        text: The (window) text
        positions: Sorted suffix starts
        tau: Partitioning parameter the positions satisfy
        method: Window ranking method, see rank_windows
        debug: Verify every adjacent LCP naively (defaults to config.DEBUG_CHECKS)

    Returns:
        SparseTree
    """
    if debug is None:
        debug = config.DEBUG_CHECKS
    positions = list(positions)
    m = text.n
    for a, b in zip(positions, positions[1:]):
        if a >= b:
            raise PipelineOrderError(f"positions not strictly increasing at {a}, {b}")
    if positions and (positions[0] < 0 or positions[-1] >= m):
        raise PipelineOrderError("positions outside the text")
    if len(positions) <= 1:
        return assemble_tree(m, positions, [])

    starts = []
    is_set = []
    for k, j in enumerate(positions):
        nxt = positions[k + 1] if k + 1 < len(positions) else m
        for x in range(j, nxt, tau):
            starts.append(x)
            is_set.append(x == j)
    chunk_count = len(starts)

    ranks = rank_windows(window_rows(text, starts, 2 * tau + 1), method)
    sa = suffix_array(ranks)
    lcp = lcp_array(ranks.tolist(), sa)

    def chunk_start(idx):
        return starts[idx] if idx < chunk_count else m

    order = []
    lcps = []
    running = chunk_count
    prev = -1
    for r, h in enumerate(sa.tolist()):
        if r > 0 and lcp[r] < running:
            running = lcp[r]
        if not is_set[h]:
            continue
        if prev >= 0:
            a, b = chunk_start(prev + running), chunk_start(h + running)
            offset = a - starts[prev]
            if offset != b - starts[h]:
                raise InvariantBreach(
                    f"positions {starts[prev]} and {starts[h]} are not synchronised")
            value = offset + text.match_length(a, b, 2 * tau + 1)
            if debug and value != text.match_length(starts[prev], starts[h]):
                raise InvariantBreach(
                    f"chunk LCP {value} disagrees with scan at {starts[prev]}, {starts[h]}")
            lcps.append(value)
        order.append(starts[h])
        prev = h
        running = chunk_count

    logger.debug("sparse tree: %d leaves, %d chunks, tau=%d", len(order), chunk_count, tau)
    return assemble_tree(m, order, lcps)


def lca_lce(tree, p, q):
    return tree.lca_lce(p, q)

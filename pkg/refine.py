"""
TauSet - Refinement phases
Push-mode pipeline that thins [0..n) phase by phase with vbit reductions.
Every stage exposes feed(pos) / advance(watermark) / finish(); a position
is fed at most once, in increasing order, and advance(d) promises that every
position <= d has been fed.
"""

import logging
import math
from collections import deque

from bitops import INF, vbit, window_vbit
from errors import InvariantBreach, ParameterError, PipelineOrderError, ProviderWindowError
from sst_core import SuffixLce, build_sparse_tree
from text_model import ParamEnv, Text, ceil_log2

logger = logging.getLogger(__name__)

HORIZON_HALVES = 5


# =============================================================================
# STAGES
# =============================================================================

class Stage:
    """Base class of push-mode stages."""

    downstream = None

    def feed(self, pos):
        raise NotImplementedError

    def advance(self, watermark):
        raise NotImplementedError

    def finish(self):
        raise NotImplementedError


class Collector(Stage):
    """Sink that buffers everything it receives."""

    def __init__(self):
        self.items = []
        self.watermark = -1
        self.finished = False

    def feed(self, pos):
        self.items.append(pos)

    def advance(self, watermark):
        self.watermark = max(self.watermark, watermark)

    def finish(self):
        self.finished = True

    def drain(self):
        out, self.items = self.items, []
        return out


def _chain(x, y):
    if x == INF:
        return INF
    y = y()
    if y == INF or x == y:
        return INF
    return vbit(x, y)


class RefinePhase(Stage):
    """
    Phase k: keeps a position of S_{k-1} when a neighbouring gap exceeds
    2^(k-1), at the borders of repeat runs, or at a local minimum of the
    four-fold vbit value.

    Per-index state lives in dicts keyed by the index h of the position in
    S_{k-1}; index h-1 is dropped once h is decided.
    """

    def __init__(self, k, provider):
        self.k = k
        self.half = 1 << (k - 1)
        self.span = 1 << k
        self.horizon = HORIZON_HALVES * self.half
        self.provider = provider
        self.text = provider.text
        self._pos = {}
        self._prime = {}
        self._repeat_flags = {}
        self._layers = ({}, {}, {})
        self._count = 0
        self._decided = 0
        self._known = -1
        self._ended = False
        self.watermark = -1
        self.fed = 0
        self.emitted = 0
        self.peak = 0

    # -- input ---------------------------------------------------------------

    def feed(self, pos):
        if pos <= self._known or (self._count and pos <= self._pos[self._count - 1]):
            raise PipelineOrderError(f"phase {self.k}: position {pos} out of order")
        h = self._count
        self._pos[h] = pos
        self._count += 1
        self.fed += 1
        if h > 0:
            prev = self._pos[h - 1]
            repeat, value = False, INF
            if pos - prev <= self.half:
                cap = self.span + 1
                ell = self.provider.lce(self.k, prev, pos, cap)
                if ell >= cap:
                    repeat = True
                else:
                    value = window_vbit(ell, self.text.read(prev + ell),
                                        self.text.read(pos + ell), self.text.code_width)
            self._repeat_flags[h - 1] = repeat
            self._prime[h - 1] = value
        if len(self._pos) > self.peak:
            self.peak = len(self._pos)

    def advance(self, watermark):
        if watermark <= self._known:
            return
        self._known = watermark
        self._decide_ready()

    def finish(self):
        self._ended = True
        self._decide_ready()
        self.downstream.finish()

    # -- values --------------------------------------------------------------

    def _settled_tail(self, h):
        """True when index h has no successor within 2^(k-1) and never will."""
        if self._ended:
            return True
        return h == self._count - 1 and self._known >= self._pos[h] + self.half

    def _repeat(self, h):
        if h < 0:
            return False
        flag = self._repeat_flags.get(h)
        if flag is not None:
            return flag
        if h >= self._count or self._settled_tail(h):
            if h >= self._count and not self._ended:
                raise InvariantBreach(f"phase {self.k}: R({h}) read before position arrived")
            return False
        raise InvariantBreach(f"phase {self.k}: R({h}) read before it was determined")

    def _vprime(self, h):
        value = self._prime.get(h)
        if value is not None:
            return value
        if self._ended or (h < self._count and self._settled_tail(h)):
            return INF
        raise InvariantBreach(f"phase {self.k}: v'({h}) read before it was determined")

    def _layer(self, level, h):
        memo = self._layers[level]
        value = memo.get(h)
        if value is None:
            below = self._vprime if level == 0 else (lambda x: self._layer(level - 1, x))
            value = _chain(below(h), lambda: below(h + 1))
            memo[h] = value
        return value

    def value(self, h):
        """v_h, the fourth vbit layer."""
        return self._layer(2, h)

    def _gap_ok(self, h):
        """Gap from index h to h+1 is at most 2^(k-1)."""
        return h >= 0 and h + 1 < self._count and self._pos[h + 1] - self._pos[h] <= self.half

    # -- decisions -----------------------------------------------------------

    def _keeps(self, h):
        if not self._gap_ok(h - 1) or not self._gap_ok(h):
            return True
        if self._repeat(h):
            if not self._repeat(h - 1) and self._repeat(h + 1) and self._repeat(h + 2):
                return True
            if not self._repeat(h + 1):
                return True
        v_prev = self.value(h - 1)
        if v_prev == INF:
            return False
        v_here = self.value(h)
        return v_prev > v_here and v_here < self.value(h + 1)

    def _decide_ready(self):
        released = False
        while self._decided < self._count:
            h = self._decided
            if not self._ended and self._known < self._pos[h] + self.horizon:
                break
            if self._keeps(h):
                self.downstream.feed(self._pos[h])
                self.emitted += 1
            self._decided += 1
            self._forget(h - 1)
            released = True
        if self._decided < self._count:
            mark = self._pos[self._decided] - 1
        else:
            mark = self._known
        if mark > self.watermark or released:
            self.watermark = max(self.watermark, mark)
            self.downstream.advance(self.watermark)

    def _forget(self, h):
        if h < 0:
            return
        self._pos.pop(h, None)
        self._prime.pop(h, None)
        self._repeat_flags.pop(h, None)
        for memo in self._layers:
            memo.pop(h, None)

    def stats(self):
        return {'k': self.k, 'fed': self.fed, 'emitted': self.emitted, 'peak_buffer': self.peak}


# =============================================================================
# STANDALONE RULE PIECES
# =============================================================================

def predicate_r(k, p, q, provider):
    """R for the pair (p, q): close enough and equal 2^k+1 windows."""
    if q - p > 1 << (k - 1):
        return False
    cap = (1 << k) + 1
    return provider.lce(k, p, q, cap) >= cap


def vprime(k, p, q, provider):
    """v' for the pair (p, q); q None means p has no successor."""
    if q is None or q - p > 1 << (k - 1):
        return INF
    cap = (1 << k) + 1
    ell = provider.lce(k, p, q, cap)
    if ell >= cap:
        return INF
    text = provider.text
    return window_vbit(ell, text.read(p + ell), text.read(q + ell), text.code_width)


def v_chain(k, positions, provider):
    """v for positions[0], given positions[0..4] (missing tail entries are absent)."""
    positions = list(positions)
    primes = []
    for i in range(4):
        if i >= len(positions):
            primes.append(INF)
            continue
        nxt = positions[i + 1] if i + 1 < len(positions) else None
        primes.append(vprime(k, positions[i], nxt, provider))
    layer = primes
    for _ in range(3):
        layer = [_chain(layer[i], lambda i=i: layer[i + 1]) for i in range(len(layer) - 1)]
    return layer[0]


def phase_step(phase, next_pos):
    """Feed one position (None ends the stream) and return what the phase emitted."""
    if phase.downstream is None:
        phase.downstream = Collector()
    if next_pos is None:
        phase.finish()
    else:
        phase.feed(next_pos)
        phase.advance(next_pos)
    return phase.downstream.drain()


# =============================================================================
# LCE PROVIDERS
# =============================================================================

class LceProvider:
    """Answers capped LCE queries min(cap, lce(p, q)) for the phases."""

    name = 'base'

    def __init__(self, text):
        self.text = text
        self.queries = 0

    def lce(self, k, p, q, cap):
        raise NotImplementedError

    def stages(self, phases):
        """The chain of stages to run: the phases plus any gates this provider needs."""
        return list(phases)

    def stats(self):
        return {'provider': self.name, 'queries': self.queries}


class ScanProvider(LceProvider):
    """Naive symbol scan."""

    name = 'scan'

    def lce(self, k, p, q, cap):
        self.queries += 1
        return self.text.match_length(p, q, cap)


class TextLceProvider(LceProvider):
    """One suffix-array structure over the whole text."""

    name = 'text'

    def __init__(self, text):
        super().__init__(text)
        self._index = None

    def lce(self, k, p, q, cap):
        if self._index is None:
            self._index = SuffixLce(self.text.symbols)
        self.queries += 1
        return min(cap, self._index.lce(p, q))


class RecordingProvider(LceProvider):
    """Wraps a provider and logs every query with the driver clock."""

    def __init__(self, inner):
        super().__init__(inner.text)
        self.inner = inner
        self.name = f"recording({inner.name})"
        self.clock = -1
        self.log = []

    def lce(self, k, p, q, cap):
        answer = self.inner.lce(k, p, q, cap)
        self.queries += 1
        self.log.append((self.clock, k, p, q, cap, answer))
        return answer

    def stages(self, phases):
        return self.inner.stages(phases)

    def stats(self):
        out = self.inner.stats()
        out['recorded'] = len(self.log)
        return out


class WindowGate(Stage):
    """
    Holds positions back until every position below the end of the next
    window [i*B, (i+3)*B) is known, rebuilds the window structure, then
    releases positions up to (i+2)*B - 1.
    """

    def __init__(self, n, block, build, label='window'):
        self.n = n
        self.block = block
        self.build = build
        self.label = label
        self.index = 0
        self.lo = 0
        self.hi = 0
        self._pending = deque()
        self._held = []
        self._known = -1
        self._ended = False
        self._done = False
        self.rebuilds = 0
        self.symbols_scanned = 0
        self.peak_entries = 0

    def feed(self, pos):
        self._pending.append(pos)
        self._held.append(pos)

    def advance(self, watermark):
        self._known = max(self._known, watermark)
        self._pump()

    def finish(self):
        self._ended = True
        self._pump()
        self.downstream.finish()

    def _pump(self):
        while not self._done:
            lo = self.index * self.block
            hi = min(self.n, lo + 3 * self.block)
            if not self._ended and self._known < hi - 1:
                return
            inside = [x for x in self._held if lo <= x < hi]
            self.build(lo, hi, inside)
            self.lo, self.hi = lo, hi
            self.rebuilds += 1
            self.symbols_scanned += hi - lo
            self.peak_entries = max(self.peak_entries, len(inside))
            logger.debug("%s gate: window %d [%d, %d) with %d positions",
                         self.label, self.index, lo, hi, len(inside))
            release = self.n - 1 if hi == self.n else lo + 2 * self.block - 1
            while self._pending and self._pending[0] <= release:
                self.downstream.feed(self._pending.popleft())
            self.downstream.advance(release)
            if hi == self.n:
                self._done = True
                return
            self.index += 1
            floor = self.index * self.block
            self._held = [x for x in self._held if x >= floor]

    def stats(self):
        return {
            'block': self.block,
            'rebuilds': self.rebuilds,
            'symbols_scanned': self.symbols_scanned,
            'peak_entries': self.peak_entries,
        }


def _check_window(lo, hi, n, p, q, cap):
    if min(p, q) < lo or max(p, q) >= hi or (hi < n and max(p, q) + cap > hi):
        raise ProviderWindowError(f"query ({p}, {q}, cap {cap}) outside window [{lo}, {hi})")


class WindowProvider(LceProvider):
    """Suffix-array structure over three consecutive blocks of the text."""

    name = 'window'

    def __init__(self, text, block):
        super().__init__(text)
        self.block = block
        self.gate = WindowGate(text.n, block, self._build, label='text')
        self._index = None

    def _build(self, lo, hi, positions):
        self._index = SuffixLce(self.text.symbols[lo:hi])

    def lce(self, k, p, q, cap):
        gate = self.gate
        _check_window(gate.lo, gate.hi, self.text.n, p, q, cap)
        self.queries += 1
        return min(cap, self._index.lce(p - gate.lo, q - gate.lo))

    def stages(self, phases):
        return [self.gate] + list(phases)

    def stats(self):
        out = super().stats()
        out.update(self.gate.stats())
        return out


class LeveledProvider(LceProvider):
    """
    Phases grouped into levels of L = floor(log2 b_hat) phases. Level p keeps
    a sparse suffix tree over S_{pL} inside windows of 3 * b_hat * 2^(pL+3)
    symbols.
    """

    name = 'leveled'

    def __init__(self, text, params):
        super().__init__(text)
        b_hat = params.b // max(1, ceil_log2(text.n))
        if b_hat < 2:
            raise ParameterError(f"b={params.b} too small for the leveled scheme (b_hat={b_hat})")
        self.b_hat = b_hat
        self.per_level = b_hat.bit_length() - 1
        levels = -(-params.phase_count // self.per_level) if params.phase_count else 0
        self.gates = []
        self._trees = []
        for level in range(levels):
            base = level * self.per_level
            block = b_hat << (base + 3)
            self._trees.append(None)
            self.gates.append(WindowGate(text.n, block, self._builder(level, 1 << (base + 3)),
                                         label=f"level {level}"))

    def _builder(self, level, tau):
        def build(lo, hi, positions):
            window = self.text.window(lo, hi)
            self._trees[level] = build_sparse_tree(window, [x - lo for x in positions], tau)
        return build

    def level_of(self, k):
        return (k - 1) // self.per_level

    def lce(self, k, p, q, cap):
        level = self.level_of(k)
        gate = self.gates[level]
        _check_window(gate.lo, gate.hi, self.text.n, p, q, cap)
        self.queries += 1
        return min(cap, self._trees[level].lca_lce(p - gate.lo, q - gate.lo))

    def stages(self, phases):
        chain = []
        for phase in phases:
            if (phase.k - 1) % self.per_level == 0:
                chain.append(self.gates[self.level_of(phase.k)])
            chain.append(phase)
        return chain

    def stats(self):
        out = super().stats()
        out['b_hat'] = self.b_hat
        out['phases_per_level'] = self.per_level
        out['levels'] = [gate.stats() for gate in self.gates]
        return out


def make_window_provider(text, window_len):
    return WindowProvider(text, window_len)


def make_leveled_provider(text, params):
    return LeveledProvider(text, params)


def select_provider(text, params):
    """Whole-text structure in desk mode; windowed or leveled schemes in reference mode."""
    if params.mode == 'desk':
        return TextLceProvider(text)
    root = math.isqrt(text.n)
    block = max(6 << params.phase_count, root)
    if params.tau < root:
        return make_window_provider(text, block)
    try:
        return make_leveled_provider(text, params)
    except ParameterError as e:
        logger.debug("falling back to the window provider: %s", e)
        return make_window_provider(text, block)


# =============================================================================
# PIPELINE
# =============================================================================

class Pipeline:
    """
    Phases 1..K wired to a sink.

    Args:
        text: Input text
        params: Size parameters
        sink: Stage receiving S_K
        provider_factory: callable(text, params) -> LceProvider
        upto: Run only the first `upto` phases
    """

    def __init__(self, text, params, sink,
                 provider_factory=None, upto=None):
        self.text = text
        self.params = params
        count = params.phase_count if upto is None else min(upto, params.phase_count)
        factory = provider_factory or select_provider
        self.provider = factory(text, params)
        self.phases = [RefinePhase(k, self.provider) for k in range(1, count + 1)]
        chain = self.provider.stages(self.phases) if self.phases else []
        chain.append(sink)
        for left, right in zip(chain, chain[1:]):
            left.downstream = right
        self.head = chain[0]
        self.sink = sink

    def step(self, d):
        self.head.feed(d)
        self.head.advance(d)

    def close(self):
        self.head.finish()

    def drive(self):
        for d in range(self.text.n):
            self.step(d)
        self.close()

    def stats(self):
        return {
            'phases': [phase.stats() for phase in self.phases],
            'provider': self.provider.stats(),
        }


def run_pipeline(text, params, provider_factory=None, upto=None):
    """Yield S_K left to right (S_0 = [0..n) when there are no phases)."""
    sink = Collector()
    pipeline = Pipeline(text, params, sink, provider_factory, upto)
    for d in range(text.n):
        pipeline.step(d)
        if sink.items:
            yield from sink.drain()
    pipeline.close()
    yield from sink.drain()

"""
TauSet - Sparsification
Turns the refinement output into the final partitioning set: stage 1 drops
positions inside short repeats, stage 2 turns each survivor into a letter
with distance counters, recompression shrinks the letter string, and a
replay of the deterministic pipeline keeps the positions whose letters
survived.
"""

import bisect
import logging
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np
import pytz
from bitarray import bitarray

import config
from bitops import INF, Chunk, encode_tuple, field_width_for, vbit, window_vbit
from errors import (DeterminismError, InvariantBreach, LetterOverflow, PipelineOrderError,
                    ProviderWindowError, RecompressionStall)
from refine import Pipeline, Stage
from sst_core import build_sparse_tree
from text_model import ParamEnv, Text

logger = logging.getLogger(__name__)


@dataclass
class PartitionSet:
    positions: list
    stage: str
    tau: int

    def __len__(self):
        return len(self.positions)

    def lines(self):
        return [str(p) for p in self.positions]


# =============================================================================
# STAGE 1
# =============================================================================

class MarkQueue:
    """Positions of S awaiting a decision, each with a removal mark."""

    def __init__(self):
        self._entries = []
        self._head = 0
        self.cursor = 0
        self.peak = 0

    def push(self, pos):
        self._entries.append([pos, False])
        live = len(self._entries) - self._head
        if live > self.peak:
            self.peak = live

    def pending(self):
        """Position at the cursor, or None."""
        if self.cursor < len(self._entries):
            return self._entries[self.cursor][0]
        return None

    def lookahead(self, limit):
        """Queue indices after the cursor whose position is <= limit."""
        out = []
        t = self.cursor + 1
        while t < len(self._entries) and self._entries[t][0] <= limit:
            out.append(t)
            t += 1
        return out

    def position(self, t):
        return self._entries[t][0]

    def mark_back(self, last):
        """Mark entries (cursor..last] right to left, stopping at the first marked one."""
        marked = 0
        t = last
        while t > self.cursor and not self._entries[t][1]:
            self._entries[t][1] = True
            marked += 1
            t -= 1
        return marked

    def pop_settled(self):
        """Unmarked positions up to and including the cursor; advances the cursor."""
        out = [pos for pos, marked in self._entries[self._head:self.cursor + 1] if not marked]
        self.cursor += 1
        self._head = self.cursor
        if self._head > 1024:
            del self._entries[:self._head]
            self.cursor -= self._head
            self._head = 0
        return out


class Stage1(Stage):
    """
    S -> S': removes every h with i < h <= j for i, j in S, j - i <= tau/4 and
    equal (tau/2 + 1)-windows at i and j. Equality tests use sparse trees over
    S inside windows [m*tau, (m+3)*tau); the two newest trees stay live for
    the letter stage downstream.
    """

    def __init__(self, text, params):
        self.text = text
        self.tau = params.tau
        self.reach = params.tau // 4
        self.cap = params.tau // 2 + 1
        self.tree_tau = max(1, params.tau // 2)
        self.queue = MarkQueue()
        self._seen = []
        self._trees = deque(maxlen=2)
        self._window = None
        self._known = -1
        self._ended = False
        self._advanced = -1
        self._last = -1
        self.received = 0
        self.emitted = 0
        self.rebuilds = 0

    def feed(self, pos):
        if pos <= self._last:
            raise PipelineOrderError(f"stage 1: position {pos} out of order")
        self._last = pos
        self.queue.push(pos)
        self._seen.append(pos)
        self.received += 1

    def advance(self, watermark):
        self._known = max(self._known, watermark)
        self._process_ready()

    def finish(self):
        self._ended = True
        self._process_ready()
        self.downstream.finish()

    def _window_of(self, i):
        return max(0, (2 * i - self.tau) // (2 * self.tau))

    def _push_watermark(self, mark):
        if mark > self._advanced:
            self._advanced = mark
            self.downstream.advance(mark)

    def _rebuild(self, m, i):
        self._push_watermark(i - 1)
        lo = m * self.tau
        hi = min(self.text.n, lo + 3 * self.tau)
        self._seen = [x for x in self._seen if x >= lo]
        inside = [x - lo for x in self._seen if x < hi]
        tree = build_sparse_tree(self.text.window(lo, hi), inside, self.tree_tau)
        self._trees.append((lo, hi, tree))
        self._window = m
        self.rebuilds += 1
        logger.debug("stage 1: window %d [%d, %d) with %d positions", m, lo, hi, len(inside))

    def lce(self, x, y, cap):
        """Capped LCE between two positions of S answered from a live window tree."""
        n = self.text.n
        for lo, hi, tree in reversed(self._trees):
            if min(x, y) >= lo and max(x, y) < hi and (hi == n or max(x, y) + cap <= hi):
                return min(cap, tree.lca_lce(x - lo, y - lo))
        raise ProviderWindowError(f"stage 1: no live window covers ({x}, {y}, cap {cap})")

    def _process_ready(self):
        while True:
            i = self.queue.pending()
            if i is None:
                return
            m = self._window_of(i)
            hi = min(self.text.n, (m + 3) * self.tau)
            if not self._ended and self._known < hi - 1:
                return
            if m != self._window:
                self._rebuild(m, i)
            for t in reversed(self.queue.lookahead(i + self.reach)):
                if self.lce(i, self.queue.position(t), self.cap) >= self.cap:
                    self.queue.mark_back(t)
                    break
            for pos in self.queue.pop_settled():
                self.downstream.feed(pos)
                self.emitted += 1
            self._push_watermark(i)

    def stats(self):
        return {
            'received': self.received,
            'emitted': self.emitted,
            'rebuilds': self.rebuilds,
            'peak_queue': self.queue.peak,
        }


# =============================================================================
# STAGE 2: LETTERS
# =============================================================================

class LetterSynth:
    """
    Letters from four rounds of tuple reduction.

    Round 1 packs, for x and each neighbour y in (x, x + tau/32], the vbit of
    the (tau/2 + 1)-windows at x and y. Rounds 2-4 pack the vbit of the
    previous-round chunk of x against that of each neighbour. Tuples are
    padded with infinity to LETTER_FANOUT * lambda3 fields.
    """

    ROUNDS = 4

    def __init__(self, text, params, positions, lce):
        self.text = text
        self.positions = positions
        self.lce = lce
        self.reach = params.tau // 32
        self.cap = params.tau // 2 + 1
        self.fields = config.LETTER_FANOUT * params.lambda3
        self.widths = []
        top = 2 * text.code_width * self.cap - 1
        for _ in range(self.ROUNDS):
            width = field_width_for(top)
            self.widths.append(width)
            top = 2 * self.fields * width - 1
        self.letter_width = self.fields * self.widths[-1]
        self._memo = [{} for _ in range(self.ROUNDS)]

    @property
    def context(self):
        """Distance to the right that must be known before a letter is final."""
        return self.ROUNDS * self.reach

    def neighbours(self, x):
        lo = bisect.bisect_right(self.positions, x)
        hi = bisect.bisect_right(self.positions, x + self.reach)
        return self.positions[lo:hi]

    def chunk(self, level, x):
        memo = self._memo[level]
        bits = memo.get(x)
        if bits is not None:
            return bits
        nbrs = self.neighbours(x)
        if len(nbrs) > self.fields:
            raise LetterOverflow(f"{len(nbrs)} neighbours at {x}, tuple holds {self.fields}")
        values = []
        if level == 0:
            cw = self.text.code_width
            for y in nbrs:
                ell = self.lce(x, y, self.cap)
                if ell >= self.cap:
                    raise InvariantBreach(f"equal windows at {x} and {y} survived stage 1")
                values.append(window_vbit(ell, self.text.read(x + ell), self.text.read(y + ell), cw))
        else:
            mine = self.chunk(level - 1, x)
            for y in nbrs:
                other = self.chunk(level - 1, y)
                values.append(INF if other == mine else vbit(mine, other))
        values.extend([INF] * (self.fields - len(values)))
        bits = encode_tuple(values, self.widths[level]).bits
        memo[x] = bits
        return bits

    def letter(self, x):
        return self.chunk(self.ROUNDS - 1, x)

    def forget_before(self, x):
        for memo in self._memo:
            for key in [key for key in memo if key < x]:
                del memo[key]


def make_letter(p, context, text, params, lce=None):
    """
    Letter of p given S' positions to its right (at least up to p + tau/8).

    Args:
        p: Position of S'
        context: Positions of S' after p
        text: Input text
        params: Size parameters
        lce: callable(x, y, cap); defaults to a naive scan

    Returns:
        Chunk of width LETTER_FANOUT * lambda3 * (last field width)
    """
    if lce is None:
        lce = text.match_length
    positions = sorted(set([p, *context]))
    synth = LetterSynth(text, params, positions, lce)
    return Chunk(synth.letter(p), synth.letter_width)


@dataclass
class RSequence:
    letters: list
    M: np.ndarray
    ids: np.ndarray
    origin: np.ndarray
    letter_width: int
    original_length: int

    def __len__(self):
        return len(self.letters)


class LetterStage(Stage):
    """Builds R and its M arrays from S' left to right."""

    def __init__(self, text, params, lce):
        self.tau = params.tau
        self.m_width = params.m_width
        self.keep_origin = params.mode == 'desk'
        self.synth = LetterSynth(text, params, [], lce)
        self._sp = self.synth.positions
        self._next_letter = 0
        self._next_final = 0
        self._known = -1
        self._ended = False
        self.letters = []
        self.m_rows = []
        self.origins = []

    def feed(self, pos):
        self._sp.append(pos)

    def advance(self, watermark):
        self._known = max(self._known, watermark)
        self._work()

    def finish(self):
        self._ended = True
        self._work()

    def _counts(self, t):
        p = self._sp[t]
        return [bisect.bisect_right(self._sp, p + (self.tau >> j)) - t - 1 for j in range(self.m_width)]

    def _work(self):
        sp = self._sp
        context = self.synth.context
        while self._next_letter < len(sp) and (self._ended or sp[self._next_letter] + context <= self._known):
            self.synth.letter(sp[self._next_letter])
            self._next_letter += 1
        while self._next_final < self._next_letter and (self._ended or sp[self._next_final] + self.tau <= self._known):
            t = self._next_final
            self.letters.append(self.synth.letter(sp[t]))
            self.m_rows.append(self._counts(t))
            self.origins.append(sp[t])
            self._next_final += 1
        if self._next_final > 2048:
            cut = self._next_final
            del sp[:cut]
            self._next_letter -= cut
            self._next_final = 0
            if sp:
                self.synth.forget_before(sp[0])

    def sequence(self):
        r = len(self.letters)
        M = np.asarray(self.m_rows, dtype=np.int32).reshape(r, self.m_width)
        return RSequence(
            letters=list(self.letters),
            M=M,
            ids=np.arange(r, dtype=np.int64),
            origin=np.asarray(self.origins, dtype=np.int64) if self.keep_origin else None,
            letter_width=self.synth.letter_width,
            original_length=r,
        )


def build_R(text, params, provider_factory=None):
    """
    One pass of refinement, stage 1 and letter synthesis.

    Returns:
        (RSequence, stats dict)
    """
    stage1 = Stage1(text, params)
    letters = LetterStage(text, params, stage1.lce)
    stage1.downstream = letters
    pipeline = Pipeline(text, params, stage1, provider_factory)
    pipeline.drive()
    stats = {'refine': pipeline.stats(), 'stage1': stage1.stats()}
    return letters.sequence(), stats


# =============================================================================
# RECOMPRESSION
# =============================================================================

@dataclass(frozen=True)
class CutPartition:
    acute: frozenset
    grave: frozenset

    def directed_weight(self, P):
        return sum(w for (a, b), w in P.items() if a in self.acute and b in self.grave)


def greedy_cut(P, alphabet=None):
    """
    Directed cut carrying at least a quarter of the total pair weight.

    Args:
        P: Mapping (a, b) -> weight for ordered letter pairs
        alphabet: Extra letters to place (defaults to the letters in P)

    Returns:
        CutPartition
    """
    adjacent = {}
    for (a, b), w in P.items():
        if not w:
            continue
        adjacent.setdefault(a, Counter())[b] += w
        adjacent.setdefault(b, Counter())[a] += w
    letters = set(alphabet or ())
    for a, b in P:
        letters.add(a)
        letters.add(b)

    acute, grave = set(), set()
    for a in sorted(letters):
        to_grave = to_acute = 0
        for b, w in adjacent.get(a, {}).items():
            if b in grave:
                to_grave += w
            elif b in acute:
                to_acute += w
        if to_grave >= to_acute:
            acute.add(a)
        else:
            grave.add(a)

    cut = CutPartition(frozenset(acute), frozenset(grave))
    reverse = CutPartition(cut.grave, cut.acute)
    if cut.directed_weight(P) < reverse.directed_weight(P):
        return reverse
    return cut


def eligible_mask(R, j):
    """i in [1..|R|-2] with M_i[j] != 0 and M_{i-1}[NEIGHBOUR_COLUMN] != 0."""
    r = len(R)
    mask = np.zeros(r, dtype=bool)
    if r >= 3:
        mask[1:r - 1] = (R.M[1:r - 1, j] != 0) & (R.M[0:r - 2, config.NEIGHBOUR_COLUMN] != 0)
    return mask


@dataclass
class StepReport:
    j: int
    d_before: int
    d_after: int
    removed: int

    def as_dict(self):
        return {'j': self.j, 'd_before': self.d_before, 'd_after': self.d_after, 'removed': self.removed}


def recompress_step(R, j):
    """
    One shrink round at distance exponent j.

    Returns:
        (new RSequence, StepReport)
    """
    eligible = eligible_mask(R, j)
    index = np.flatnonzero(eligible)
    P = Counter()
    for i in index.tolist():
        a, b = R.letters[i], R.letters[i + 1]
        if a == b:
            raise InvariantBreach(f"equal adjacent letters at {i} with a close successor")
        P[(a, b)] += 1
    d_before = int(index.size)
    if d_before == 0:
        return R, StepReport(j, 0, 0, 0)

    cut = greedy_cut(P)
    remove = np.zeros(len(R), dtype=bool)
    for i in index.tolist():
        if R.letters[i] in cut.acute and R.letters[i + 1] in cut.grave:
            remove[i] = True
    keep = ~remove

    prefix = np.concatenate([[0], np.cumsum(keep, dtype=np.int64)])
    rows = np.arange(len(R), dtype=np.int64)[:, None]
    recount = prefix[rows + 1 + R.M] - prefix[rows + 1]
    kept_rows = np.flatnonzero(keep)
    updated = RSequence(
        letters=[R.letters[i] for i in kept_rows.tolist()],
        M=recount[keep].astype(np.int32),
        ids=R.ids[keep],
        origin=None if R.origin is None else R.origin[keep],
        letter_width=R.letter_width,
        original_length=R.original_length,
    )
    d_after = int(eligible_mask(updated, j).sum())
    if 4 * d_after > 3 * d_before:
        raise InvariantBreach(f"j={j}: eligible pairs went from {d_before} to {d_after}")
    report = StepReport(j, d_before, d_after, int(remove.sum()))
    logger.debug("recompress j=%d: d %d -> %d, removed %d", j, d_before, d_after, report.removed)
    return updated, report


def _over_threshold(length, j, params):
    exponent = j + params.shrink_slack
    if exponent >= 0:
        return length * params.tau > params.n << exponent
    return (length * params.tau) << (-exponent) > params.n


@dataclass
class LevelOutcome:
    """
    How the loop left one distance exponent: 'reached' (at or below the
    threshold), 'capped' (still above after the allowed rounds, with
    eligible pairs left) or 'saturated' (still above, nothing removable).
    """
    j: int
    rounds: int
    length_before: int
    length_after: int
    eligible_left: int
    status: str

    @property
    def finished(self):
        return self.status == 'reached'

    def as_dict(self):
        return {
            'j': self.j,
            'rounds': self.rounds,
            'length_before': self.length_before,
            'length_after': self.length_after,
            'eligible_left': self.eligible_left,
            'status': self.status,
        }


def recompress_loop(R, params, observer=None):
    """
    Shrink R for j from the top exponent down to 6.

    With shrink_slack >= config.STRICT_SHRINK_SLACK an exponent that is not
    reached raises RecompressionStall; below that the outcome is recorded
    and the loop moves on to the next exponent.

    Args:
        R: Letter sequence from build_R
        params: Size parameters (distance exponents, shrink slack)
        observer: Optional callable(RSequence, StepReport) run after every step

    Returns:
        (keep-mask bitarray over the original letters, final RSequence,
         list of StepReport, list of LevelOutcome)
    """
    strict = params.shrink_slack >= config.STRICT_SHRINK_SLACK
    steps = []
    levels = []
    for j in params.distance_exponents:
        before = len(R)
        rounds = 0
        status = 'reached'
        while _over_threshold(len(R), j, params):
            if rounds == config.RECOMPRESSION_ROUNDS:
                status = 'capped'
                break
            R, report = recompress_step(R, j)
            steps.append(report)
            if observer is not None:
                observer(R, report)
            rounds += 1
            if report.removed == 0:
                status = 'saturated'
                break
        outcome = LevelOutcome(j, rounds, before, len(R), int(eligible_mask(R, j).sum()), status)
        levels.append(outcome)
        if outcome.finished:
            continue
        if strict:
            if status == 'capped':
                raise RecompressionStall(f"j={j} still above threshold after {rounds} rounds")
            raise RecompressionStall(f"j={j}: nothing removable above threshold")
        logger.debug("recompress j=%d left %s at |R|=%d after %d rounds", j, status, len(R), rounds)
    mask = bitarray(R.original_length)
    mask.setall(0)
    for i in R.ids.tolist():
        mask[i] = 1
    return mask, R, steps, levels


# =============================================================================
# REPLAY
# =============================================================================

class MaskFilter(Stage):
    """Keeps the i-th incoming position iff mask[i] is set."""

    def __init__(self, mask):
        self.mask = mask
        self.seen = 0
        self.kept = []

    def feed(self, pos):
        if self.seen < len(self.mask) and self.mask[self.seen]:
            self.kept.append(pos)
        self.seen += 1

    def advance(self, watermark):
        pass

    def finish(self):
        pass


def replay_to_sstar(text, params, E, provider_factory=None):
    """Rerun refinement and stage 1, keeping S' positions whose letter survived."""
    sink = MaskFilter(E)
    stage1 = Stage1(text, params)
    stage1.downstream = sink
    Pipeline(text, params, stage1, provider_factory).drive()
    if sink.seen != len(E):
        raise DeterminismError(f"replay produced {sink.seen} positions, mask has {len(E)}")
    return sink.kept


# =============================================================================
# FULL BUILD
# =============================================================================

@dataclass
class PartitionResult:
    sstar: PartitionSet
    mask: bitarray
    initial: RSequence
    final: RSequence
    steps: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)


def build_partition(text, params, provider_factory=None,
                    replay=None):
    """
    Build S* for the text.

    Args:
        text: Input text
        params: Size parameters
        provider_factory: callable(text, params) -> LceProvider
        replay: Rerun the pipeline to recover S* (default: reference mode only;
                desk mode reads positions from the stored letter origins)

    Returns:
        PartitionResult with a stats dict in stable key order
    """
    if replay is None:
        replay = params.mode == 'reference'
    started = datetime.now(pytz.utc)
    t0 = time.perf_counter()
    initial, pass_stats = build_R(text, params, provider_factory)
    t1 = time.perf_counter()
    mask, final, steps, levels = recompress_loop(initial, params)
    t2 = time.perf_counter()
    if replay or final.origin is None:
        positions = replay_to_sstar(text, params, mask, provider_factory)
    else:
        positions = final.origin.tolist()
    t3 = time.perf_counter()

    iterations = Counter(step.j for step in steps)
    removed = Counter()
    for step in steps:
        removed[step.j] += step.removed
    last_phase = pass_stats['refine']['phases'][-1]['emitted'] if params.phase_count else text.n
    stats = {
        'params': params.as_dict(),
        'sizes': {
            's_k': last_phase,
            's_prime': len(initial),
            'r_initial': len(initial),
            'r_final': len(final),
            's_star': len(positions),
        },
        'ratio': round(len(positions) * params.tau / text.n, 6),
        'recompression': {
            'iterations': {str(j): iterations.get(j, 0) for j in params.distance_exponents},
            'removed': {str(j): removed.get(j, 0) for j in params.distance_exponents},
            'steps': [step.as_dict() for step in steps],
            'levels': [level.as_dict() for level in levels],
            'unfinished': sum(1 for level in levels if not level.finished),
        },
        'letter_width': initial.letter_width,
        'replayed': bool(replay or final.origin is None),
        'stage1': pass_stats['stage1'],
        'refine': pass_stats['refine'],
        'timing': {
            'started_at': started.isoformat(),
            'letters_s': round(t1 - t0, 6),
            'recompression_s': round(t2 - t1, 6),
            'sstar_s': round(t3 - t2, 6),
        },
    }
    logger.info("partition built: n=%d tau=%d |S*|=%d", text.n, params.tau, len(positions))
    return PartitionResult(
        sstar=PartitionSet(positions, 'S_star', params.tau),
        mask=mask,
        initial=initial,
        final=final,
        steps=steps,
        levels=levels,
        stats=stats,
    )

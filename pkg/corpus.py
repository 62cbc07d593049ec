"""
TauSet - Corpus generation
Deterministic test texts. Every generator draws from one 64-bit linear
congruential generator:

    x' = (6364136223846793005 * x + 1442695040888963407) mod 2^64
    symbol = (x' >> 33) mod sigma

seeded with the user seed, so outputs are identical on every platform.
"""

import logging
from dataclasses import dataclass

import numpy as np

import config
from text_model import Text

logger = logging.getLogger(__name__)

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1
KINDS = ('random', 'periodic', 'fibonacci', 'runs', 'mixed')


class Lcg:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK64
        return self.state >> 33

    def below(self, bound):
        return self.next() % bound


def random_symbols(n, sigma, seed):
    rng = Lcg(seed)
    return [rng.below(sigma) for _ in range(n)]


def periodic_symbols(n, sigma, seed):
    """A random root of length 1..16 repeated to length n."""
    rng = Lcg(seed)
    root = [rng.below(sigma) for _ in range(1 + rng.below(16))]
    return [root[i % len(root)] for i in range(n)]


def fibonacci_symbols(n):
    """Prefix of the Fibonacci word over {0, 1} (F1 = 0, F2 = 01, F_k = F_{k-1} F_{k-2})."""
    prev, cur = [0], [0, 1]
    while len(cur) < n:
        prev, cur = cur, cur + prev
    return (cur if n > 1 else prev)[:n]


def runs_symbols(n, sigma, seed):
    """Alternating random blocks and periodic runs with short roots."""
    rng = Lcg(seed)
    out = []
    while len(out) < n:
        length = 8 + rng.below(120)
        if rng.below(2):
            out.extend(rng.below(sigma) for _ in range(length))
        else:
            root = [rng.below(sigma) for _ in range(1 + rng.below(4))]
            out.extend(root[i % len(root)] for i in range(length))
    return out[:n]


def mixed_symbols(n, sigma, seed):
    """Random prefix, one long periodic stretch, random tail; roughly a third each."""
    rng = Lcg(seed)
    cut1 = n // 3 + rng.below(max(1, n // 8))
    cut2 = min(n, cut1 + n // 3 + rng.below(max(1, n // 8)))
    root = [rng.below(sigma) for _ in range(1 + rng.below(8))]
    out = [rng.below(sigma) for _ in range(cut1)]
    out.extend(root[i % len(root)] for i in range(cut2 - cut1))
    out.extend(rng.below(sigma) for _ in range(n - cut2))
    return out


def generate(kind, n, sigma=config.DEFAULT_SIGMA,
             seed=config.DEFAULT_SEED):
    """
    Symbols of a generated text.

    Args:
        kind: One of KINDS
        n: Length
        sigma: Alphabet size (ignored by 'fibonacci')
        seed: LCG seed

    Returns:
        List of n symbols in [0..sigma)
    """
    if n < 1:
        raise ValueError("n must be positive")
    if kind == 'random':
        return random_symbols(n, sigma, seed)
    if kind == 'periodic':
        return periodic_symbols(n, sigma, seed)
    if kind == 'fibonacci':
        return fibonacci_symbols(n)
    if kind == 'runs':
        return runs_symbols(n, sigma, seed)
    if kind == 'mixed':
        return mixed_symbols(n, sigma, seed)
    raise ValueError(f"unknown corpus kind '{kind}'")


def encode(symbols, sigma):
    """
    File bytes for generated symbols: letters from 'a' when sigma <= 26,
    raw bytes when sigma <= 256, little-endian u32 otherwise.
    """
    if sigma <= 26:
        return bytes(ord('a') + x for x in symbols)
    if sigma <= 256:
        return bytes(symbols)
    return np.asarray(symbols, dtype='<u4').tobytes()


def format_for(sigma):
    return 'u32le' if sigma > 256 else 'bytes'


@dataclass(frozen=True)
class Instance:
    name: str
    text: Text
    tau: int


def default_corpus(seed=config.DEFAULT_SEED, lengths=config.DEFAULT_CORPUS_LENGTHS,
                   taus=config.DEFAULT_CORPUS_TAUS, sigmas=(2, 4, 256),
                   variants=config.DEFAULT_CORPUS_VARIANTS):
    """
    Instances for the verify command.

    Every length gets `variants` seeded texts of each seeded kind (random
    texts once per sigma), one Fibonacci prefix and one unary text; each text
    is paired with every tau in taus with 4 <= tau <= n/4.
    """
    texts = []
    for n in lengths:
        for v in range(variants):
            base = seed + 1009 * v + n
            for sigma in sigmas:
                texts.append((f"random-s{sigma}-n{n}-v{v}", generate('random', n, sigma, base + sigma)))
            texts.append((f"periodic-n{n}-v{v}", generate('periodic', n, 4, base)))
            texts.append((f"runs-n{n}-v{v}", generate('runs', n, 4, base + 7 * n)))
            texts.append((f"mixed-n{n}-v{v}", generate('mixed', n, 4, base + 13 * n)))
        texts.append((f"fibonacci-n{n}", generate('fibonacci', n)))
        texts.append((f"unary-n{n}", [0] * n))

    instances = []
    for name, symbols in texts:
        text = Text(symbols)
        for tau in taus:
            if 4 <= tau <= text.n // 4:
                instances.append(Instance(f"{name}-t{tau}", text, tau))
    logger.debug("default corpus: %d instances", len(instances))
    return instances

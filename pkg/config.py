"""
TauSet - Configuration
Module-level defaults. Command-line flags override the values used per run.
"""

# =============================================================================
# PIPELINE DEFAULTS
# =============================================================================
DEFAULT_MODE = 'desk'           # 'reference' or 'desk'
DEFAULT_LAMBDA4 = 10            # desk-mode top distance exponent for recompression
ALPHABET_EXPONENT = 4           # sigma must stay below max(n, 256) ** ALPHABET_EXPONENT
SHRINK_SLACK = 10               # recompression runs while |R| > 2^(j + SHRINK_SLACK) * n / tau
LETTER_FANOUT = 64              # letter tuples carry LETTER_FANOUT * lambda3 fields
LOWEST_DISTANCE_EXPONENT = 6    # recompression stops after j = 6
NEIGHBOUR_COLUMN = 5            # M column guarding removals (distance tau / 32)
RECOMPRESSION_ROUNDS = 3        # rounds allowed per distance exponent
STRICT_SHRINK_SLACK = 4         # from this slack up, an unfinished exponent is an error
# =============================================================================

# =============================================================================
# DEBUG CHECKS
# Turn on to verify alignment claims and query horizons at runtime.
# Expensive: several checks fall back to naive scans.
# =============================================================================
DEBUG_CHECKS = False
# =============================================================================

# =============================================================================
# RUN LOG
# =============================================================================
RUNLOG_DB_PATH = 'tauset_runs.db'
RUNLOG_ENABLED = True
# =============================================================================

# =============================================================================
# CORPUS GENERATION
# =============================================================================
DEFAULT_SEED = 20240229
DEFAULT_SIGMA = 4
DEFAULT_CORPUS_LENGTHS = (64, 128, 256, 512, 1024, 2048)
DEFAULT_CORPUS_TAUS = (4, 8, 16, 32, 64, 128, 256)
DEFAULT_CORPUS_VARIANTS = 3         # seeds per seeded kind and length
# =============================================================================

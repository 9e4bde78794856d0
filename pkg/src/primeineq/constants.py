"""Every numeric constant the checkers rely on, in one place.

Real-valued constants are kept as exact decimal strings; they are converted
to enclosures with outward rounding at the point of use, never through a
bare ``float()``.
"""

from __future__ import annotations

from dataclasses import dataclass

# Index at which the Dusart upper bound for p_k starts to apply
# (Dusart 1999: p_k <= k(log k + log log k - 1 + (log log k - 1.8)/log k)).
DUSART_UPPER_MIN_INDEX = 27076
# Dusart 1999 lower bound, valid for k >= 2.
DUSART_LOWER_MIN_INDEX = 2
DUSART_LOWER_SHIFT = "2.25"
DUSART_UPPER_SHIFT = "1.8"

# Split point m of the harmonic tail argument; the prefix sum below m is
# bounded numerically and the rest analytically.
HARMONIC_SPLIT = 27076
# Sum_{k < 27076} p_k / k is claimed to stay below this.
HARMONIC_PREFIX_BOUND = "283452.35"
# Lower start of the 1/log k sum and its claimed lower bound over [164, 27075].
LOGSUM_START = 164
LOGSUM_PREFIX_BOUND = "2948.64"
# 326/log^2(164) + 2948.64 is folded into this single constant.
FOLDED_CONSTANT = "2961.17"
FOLDED_NUMERATOR = 326
# Residual constant left after collecting every n-independent term.
TAIL_RESIDUAL = "8992.62"
TAIL_RESIDUAL_OFFSET = "283451.35"

# Claimed start of positivity for the tail-margin expression.
TAIL_CROSSOVER = 49583
# Range searched for the crossover by default.
TAIL_SEARCH_RANGE = (1000, 1_000_000)


@dataclass(frozen=True)
class TailMarginParams:
    """Coefficients of the tail-margin expression

    F(n) = c1 n/log n + c2 n/log^2 n - c3 n loglog n/log^2 n
           - sqrt(n)(loglog n - c5)/log^2(c4_base) - log n + c6 loglog n - c7
    """

    c1: str = "0.55"
    c2: str = "8.2"
    c3: str = "4"
    c4_base: int = LOGSUM_START  # c4 = 1/log^2(164)
    c5: str = DUSART_UPPER_SHIFT
    c6: str = "2960.17"
    c7: str = TAIL_RESIDUAL


TAIL_MARGIN = TailMarginParams()

# Claimed thresholds: the inequality holds for every n >= value.
# Mandl's inequality, Hassani's refinement, then the three newer inequalities
# and the weighted variant (stated as "n > 30").
CLAIMED_THRESHOLDS: dict[str, int] = {
    "mandl": 9,
    "hassani": 10,
    "sun-harmonic": 125,
    "sun-weighted": 2700,
    "sun-half": 417,
    "abstract-weighted": 31,
}

# Claimed n0(a, b) for the general weighted inequality, keyed by (a, b).
# (-2047, 1) violates a > -b; it is kept so a scan can be run and flagged.
CLAIMED_GENERAL_THRESHOLDS: dict[tuple[int, int], int] = {
    (3, 1): 6048,
    (4, 1): 6077,
    (5, 1): 9260,
    (6, 1): 20477,
    (7, 1): 30398,
    (8, 1): 37358,
    (9, 1): 37374,
    (10, 1): 92608,
    (-2047, 1): 2215,
    (-1, 2): 348271,
}

DEFAULT_SCALE_BITS = 64
SCALE_STEP_BITS = 32
MAX_SCALE_BITS = 1024

# Hard ceiling on sieve bounds; values must stay within unsigned 64 bits.
DEFAULT_SIEVE_CAP = 1 << 40
UINT64_LIMIT = 1 << 64

# Odd slots per sieve segment (one byte each); sized for a typical L2.
DEFAULT_SEGMENT_SIZE = 1 << 18

DEFAULT_CHECKPOINT_EVERY = 100_000
DEFAULT_BLOCK_SIZE = 100_000

"""One test group per acceptance criterion; conftest prints a PASS/FAIL line for each."""

from __future__ import annotations

import math
import os
import random
import time
from fractions import Fraction

import pytest

from primeineq import analytic
from primeineq.cli import main as cli_main
from primeineq.conjecture import check_conjecture_all, load_bundled
from primeineq.exact_sums import InequalityId, Kind
from primeineq.thresholds import resume, scan

from conftest import first_primes, primes_td

N_MAX = 200_000
WORKERS = max(1, min(os.cpu_count() or 1, 8))
MINUTES = 60_000.0  # ms

# tolerances pinned from the acceptance text
SCAN_BUDGET_MS = 5 * MINUTES   # "within minutes" at 2e5
BOUNDS_BUDGET_MS = 3 * MINUTES  # "under a few minutes" at 1e6
CONSTANT_REL_WIDTH = 1e-6
LOGSUM_PAIRS = 100
ORACLE_N = 10_000


# ---- 1 ------------------------------------------------------------------

BASIC_CLAIMS = [
    (Kind.MANDL, 9),
    (Kind.HASSANI, 10),
    (Kind.SUN_HARMONIC, 125),
    (Kind.SUN_HALF, 417),
    (Kind.ABSTRACT_WEIGHTED, 31),
    (Kind.SUN_WEIGHTED, 2700),
]


@pytest.mark.acceptance(1)
@pytest.mark.parametrize("kind,claimed", BASIC_CLAIMS, ids=[k.value for k, _ in BASIC_CLAIMS])
def test_basic_threshold(kind, claimed, note):
    cert = scan(InequalityId(kind), N_MAX, workers=WORKERS)
    note(f"{kind.value}: threshold {cert.threshold} (claimed {claimed}), "
         f"last failure {cert.last_failure}, {cert.elapsed_ms:.0f} ms")
    assert cert.complete
    assert cert.elapsed_ms < SCAN_BUDGET_MS
    if kind is Kind.SUN_WEIGHTED:
        # holds on every scanned n >= claim; record the true last failure
        assert cert.last_failure is not None and cert.last_failure < claimed
    else:
        assert cert.threshold == claimed


# ---- 2 ------------------------------------------------------------------

GENERAL_CLAIMS = {3: 6048, 4: 6077, 5: 9260, 6: 20477, 7: 30398, 8: 37358, 9: 37374, 10: 92608}


@pytest.mark.acceptance(2)
@pytest.mark.parametrize("a", sorted(GENERAL_CLAIMS))
def test_general_threshold(a, note):
    cert = scan(InequalityId(Kind.GENERAL_FIRST, a=a, b=1), N_MAX, workers=WORKERS)
    claimed = GENERAL_CLAIMS[a]
    flag = "" if cert.threshold == claimed else "  <-- MISMATCH"
    note(f"n0({a},1) = {cert.threshold} (claimed {claimed}){flag}")
    assert cert.complete
    assert cert.claim_status == "match"
    assert cert.threshold == claimed


# ---- 3 ------------------------------------------------------------------

@pytest.mark.acceptance(3)
def test_constants(capsys, note):
    import json

    code = cli_main(["constants"])
    report = json.loads(capsys.readouterr().out)
    for name in ("sum-pk-over-k", "logsum-164", "folded-constant"):
        c = report["constants"][name]
        enc = c["enclosure"]
        note(f"{name}: [{enc['lo']!r}, {enc['hi']!r}] rel width {enc['relative_width']:.1e}")
        assert c["holds"], name
        assert enc["relative_width"] < CONSTANT_REL_WIDTH, name
    assert code == 0


# ---- 4 ------------------------------------------------------------------

@pytest.mark.acceptance(4)
@pytest.mark.parametrize("upper", [False, True], ids=["lower", "upper"])
def test_dusart_bounds(upper, note):
    t0 = time.perf_counter()
    r = analytic.dusart_check(upper, 1_000_000)
    ms = (time.perf_counter() - t0) * 1000
    note(f"{'upper' if upper else 'lower'}: k in [{r['k_min']}, 1e6], "
         f"{len(r['violations'])} violations, worst slack {r['worst_relative_slack']:.2e}, {ms:.0f} ms")
    assert r["k_min"] == (27076 if upper else 2)
    assert r["violations"] == []
    assert ms < BOUNDS_BUDGET_MS


# ---- 5 ------------------------------------------------------------------

@pytest.mark.acceptance(5)
def test_tail_crossover(note):
    at = analytic.tail_margin(49583)
    n = analytic.find_crossover(analytic.tail_margin, 1000, 1_000_000)
    note(f"F(49583) in [{at.lo:.10g}, {at.hi:.10g}]; minimal certified crossover on "
         f"[1e3, 1e6] = {n} (stated constant 49583)")
    assert at.lo > 0
    assert n <= 49583
    assert analytic.tail_margin(n).lo > 0


# ---- 6 ------------------------------------------------------------------

@pytest.mark.acceptance(6)
def test_logsum_bound_random(note):
    rng = random.Random(0x2_2)
    worst = math.inf
    for _ in range(LOGSUM_PAIRS):
        n = rng.randint(17, 1_000_000)
        m = rng.randint(3, math.isqrt(n - 1))
        assert 3 <= m and m * m < n
        exact = analytic.exact_logsum(m, n)
        bound = analytic.logsum_upper_bound(m, n)
        assert exact.hi < bound.lo, (m, n)
        worst = min(worst, bound.lo - exact.hi)
    note(f"{LOGSUM_PAIRS} pairs, smallest certified gap {worst:.4g}")


# ---- 7 ------------------------------------------------------------------

@pytest.mark.acceptance(7)
@pytest.mark.parametrize("label", ["mersenne", "fibonacci"])
def test_conjecture_lists(label, note):
    r = check_conjecture_all(load_bundled(label))
    note(f"{label}: n in [2, {r.length}], failures {r.failures}, min relative margin "
         f"{r.min_margin.lo:.4g} at n={r.min_margin_at}")
    assert r.indeterminates == []
    assert r.failures == []


# ---- 8 ------------------------------------------------------------------

ORACLE_CASES = [
    ("mandl", None, None), ("hassani", None, None), ("sun-harmonic", None, None),
    ("sun-weighted", None, None), ("sun-half", None, None), ("abstract-weighted", None, None),
    ("general", 1, 1), ("general", 3, 1), ("general", 10, 1), ("general", 2, 2),
    ("general", 0, 1), ("general", -1, 2), ("general-second", None, 1),
    ("general-second", None, 2),
]


def _oracle_failures(kind, a, b, primes):
    """Failures for n <= len(primes), from running Fraction sums."""
    total = Fraction(0)
    fails = []
    for k, p in enumerate(primes, 1):
        if kind in ("mandl", "hassani", "sun-half"):
            total += p
        elif kind == "sun-harmonic":
            total += Fraction(p, k)
        elif kind in ("sun-weighted", "abstract-weighted"):
            total += k * p
        elif kind == "general":
            total += Fraction(k) ** (a - 1) * p**b
        else:
            total += Fraction(p**b, k ** (b + 1))
        n = Fraction(k)
        rhs = {
            "mandl": lambda: n * p / 2,
            "hassani": lambda: n * p / 2 - n * n / 14,
            "sun-half": lambda: n * p / 2 - n * n / 4,
            "sun-harmonic": lambda: p - n,
            "sun-weighted": lambda: n * n * p / 3 - n**3 / 9,
            "abstract-weighted": lambda: n * n * p / 3,
            "general": lambda: n**a * p**b / (a + b) - b * n ** (a + 1) * Fraction(p) ** (b - 1) / (a + b) ** 2,
            "general-second": lambda: (Fraction(p) ** (b + 1) - n * p**b) / ((b + 1) * n ** (b + 1)),
        }[kind]()
        if not total < rhs:
            fails.append(k)
    return fails


@pytest.mark.acceptance(8)
def test_sieve_matches_trial_division(note):
    assert first_primes(ORACLE_N) == primes_td(ORACLE_N)
    from primeineq.primes import primes_list

    assert primes_list(ORACLE_N) == primes_td(ORACLE_N)
    note(f"sieve = trial division for k <= {ORACLE_N}")


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("kind,a,b", ORACLE_CASES,
                         ids=[f"{k}-{a}-{b}" for k, a, b in ORACLE_CASES])
def test_decisions_match_rational_oracle(kind, a, b, note):
    primes = first_primes(ORACLE_N)
    ineq = InequalityId.parse(kind if kind != "general-second" else "general", a, b)
    cert = scan(ineq, ORACLE_N)
    assert cert.complete
    assert cert.failures == _oracle_failures(kind, a, b, primes)
    note(f"{ineq}: {len(cert.failures)} failures agree on n <= {ORACLE_N}")


# ---- 9 ------------------------------------------------------------------

DETERMINISM_CASES = [InequalityId(Kind.SUN_HARMONIC), InequalityId(Kind.SUN_WEIGHTED),
                     InequalityId(Kind.GENERAL_FIRST, a=3, b=1),
                     InequalityId(Kind.GENERAL_SECOND, b=1)]


@pytest.mark.acceptance(9)
@pytest.mark.parametrize("ineq", DETERMINISM_CASES, ids=str)
def test_block_size_and_resume(ineq, tmp_path, note):
    n_max = N_MAX if not ineq.is_general else 60_000
    small = scan(ineq, n_max, block_size=1_000, workers=WORKERS).canonical_json()
    large = scan(ineq, n_max, block_size=100_000, workers=WORKERS).canonical_json()
    assert small.encode() == large.encode()
    path = tmp_path / "ck"
    scan(ineq, n_max // 2, n_max // 4, path)
    resumed = resume(path, ineq, n_max, n_max // 4, workers=WORKERS).canonical_json()
    assert resumed.encode() == large.encode()
    note(f"{ineq} to {n_max}: block 1e3 == block 1e5 == resumed")

"""Threshold scans: check an inequality at every n up to a limit.

A certificate only speaks about the scanned range. Its threshold is one past
the last failing n; it never claims anything beyond ``scan_max``.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__, kernels
from .checkpoint import (
    Checkpoint,
    CheckpointMismatchError,
    CorruptCheckpointError,
    read_checkpoint,
    write_checkpoint,
)
from .constants import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_CHECKPOINT_EVERY,
    DEFAULT_SCALE_BITS,
    DEFAULT_SEGMENT_SIZE,
    DEFAULT_SIEVE_CAP,
    MAX_SCALE_BITS,
    SCALE_STEP_BITS,
)
from .exact_sums import (
    KERNEL_CODES,
    GeneralSumState,
    InequalityId,
    SumState,
    Verdict,
    check_general,
    decide,
    new_state,
    refine_scale,
)
from .primes import PrimeStream, ResourceLimitError, primes_list, upper_bound_for_nth_prime

ELIDE_OVER = 200
ELIDE_KEEP = 100
# Upper limit on primes held in memory at once by the parallel scan.
MAX_WAVE = 1 << 20


@dataclass
class ThresholdCertificate:
    inequality: str
    params: dict
    scan_max: int
    failures: list[int]
    indeterminates: list[int] = field(default_factory=list)
    scale_bits: int = DEFAULT_SCALE_BITS
    claimed_threshold: int | None = None
    outside_hypothesis: bool = False
    elapsed_ms: float = 0.0
    artifact_version: str = __version__

    @property
    def last_failure(self) -> int | None:
        return self.failures[-1] if self.failures else None

    @property
    def threshold(self) -> int | None:
        """Smallest t with every n in [t, scan_max] passing; None if n = scan_max fails."""
        if not self.failures:
            return 1
        t = self.failures[-1] + 1
        return t if t <= self.scan_max else None

    @property
    def complete(self) -> bool:
        return not self.indeterminates

    @property
    def claim_status(self) -> str | None:
        """How the scan relates to the claimed threshold.

        ``match``: threshold equals the claim. ``claim-not-minimal``: the
        inequality already holds from an earlier n. ``refuted``: some n at or
        above the claim fails. ``beyond-scan``: the claim exceeds scan_max.
        """
        claimed = self.claimed_threshold
        if claimed is None:
            return None
        if claimed > self.scan_max:
            return "beyond-scan"
        if self.last_failure is not None and self.last_failure >= claimed:
            return "refuted"
        if not self.complete and any(n >= claimed for n in self.indeterminates):
            return "undecided"
        return "match" if self.threshold == claimed else "claim-not-minimal"

    @property
    def claim_holds(self) -> bool | None:
        """Every scanned n >= the claimed threshold passes."""
        status = self.claim_status
        if status in (None, "beyond-scan", "undecided"):
            return None
        return status != "refuted"

    def failures_json(self):
        if len(self.failures) <= ELIDE_OVER:
            return list(self.failures)
        return {
            "count": len(self.failures),
            "first": self.failures[:ELIDE_KEEP],
            "last": self.failures[-ELIDE_KEEP:],
        }

    def to_dict(self, meta: dict | None = None) -> dict:
        out = {
            "inequality": self.inequality,
            "params": self.params,
            "scan_max": self.scan_max,
            "last_failure": self.last_failure,
            "threshold": self.threshold,
            "failure_count": len(self.failures),
            "failures": self.failures_json(),
            "indeterminates": list(self.indeterminates),
            "complete": self.complete,
            "scale_bits": self.scale_bits,
            "claimed_threshold": self.claimed_threshold,
            "claim_status": self.claim_status,
            "claim_holds": self.claim_holds,
            "outside_hypothesis": self.outside_hypothesis,
            "version": self.artifact_version,
        }
        if meta is not None:
            out["meta"] = {"elapsed_ms": self.elapsed_ms, **meta}
        return out

    def canonical_json(self) -> str:
        """Deterministic serialization without timing data."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _partial_task(ineq: InequalityId, scale_bits: int, k0: int, primes: list[int]):
    if ineq.is_general:
        return GeneralSumState.for_inequality(ineq, scale_bits).partial_sums(k0, primes)
    return kernels.block_sums(k0, primes, scale_bits)


def _check_block(ineq: InequalityId, state, primes: list[int]):
    """Advance ``state`` through ``primes`` and check each n. Mutates state."""
    k0 = state.n + 1
    if not ineq.is_general:
        s1, skp, h_lo, h_hi, fails, indet = kernels.block_scan(
            KERNEL_CODES[ineq.kind], k0, primes,
            state.s1, state.skp, state.h_lo, state.h_hi, state.scale_bits,
        )
        state.s1, state.skp, state.h_lo, state.h_hi = s1, skp, h_lo, h_hi
        state.n += len(primes)
        state.p_n = primes[-1]
        return fails, indet
    fails, indet = [], []
    k = k0
    for p in primes:
        state.advance(k, p)
        verdict = check_general(state, ineq).verdict
        if verdict is Verdict.FAILS:
            fails.append(k)
        elif verdict is Verdict.INDETERMINATE:
            indet.append(k)
        k += 1
    return fails, indet


def _apply_partial(state, sums, count: int, last_prime: int):
    if isinstance(state, SumState):
        state.s1 += sums[0]
        state.skp += sums[1]
        state.h_lo += sums[2]
        state.h_hi += sums[3]
        state.n += count
        state.p_n = last_prime
        return state
    return state.add_partial(sums, count, last_prime)


def _copy_state(state):
    if isinstance(state, SumState):
        return SumState(state.n, state.p_n, state.s1, state.skp, state.h_lo,
                        state.h_hi, state.scale_bits)
    return GeneralSumState(state.b, state.a, state.n, state.p_n, state.w_lo,
                           state.w_hi, state.v_lo, state.v_hi, state.scale_bits,
                           state.track_first, state.track_second)


def _state_row(state) -> dict:
    if isinstance(state, SumState):
        return {"n": state.n, "p_n": state.p_n, "s1": state.s1, "skp": state.skp,
                "h_lo": state.h_lo, "h_hi": state.h_hi, "scale_bits": state.scale_bits}
    return {"n": state.n, "p_n": state.p_n, "w_lo": state.w_lo, "w_hi": state.w_hi,
            "v_lo": state.v_lo, "v_hi": state.v_hi, "scale_bits": state.scale_bits}


def _state_from_row(ineq: InequalityId, row: dict):
    if not ineq.is_general:
        return SumState(row["n"], row["p_n"], row["s1"], row["skp"], row["h_lo"],
                        row["h_hi"], row["scale_bits"])
    state = GeneralSumState.for_inequality(ineq, row["scale_bits"])
    state.n, state.p_n = row["n"], row["p_n"]
    state.w_lo, state.w_hi = row["w_lo"], row["w_hi"]
    state.v_lo, state.v_hi = row["v_lo"], row["v_hi"]
    return state


class _Scan:
    def __init__(self, ineq, n_max, *, checkpoint_every, checkpoint_path,
                 block_size, workers, scale_bits, max_bound, segment_size):
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        if block_size < 1:
            raise ValueError("block_size must be positive")
        if upper_bound_for_nth_prime(n_max) > max_bound:
            raise ResourceLimitError(f"p_{n_max} is expected beyond the sieve cap {max_bound}")
        self.ineq = ineq
        self.n_max = n_max
        self.checkpoint_every = checkpoint_every or 0
        self.checkpoint_path = checkpoint_path
        self.block_size = block_size
        self.workers = max(1, workers)
        self.max_bound = max_bound
        self.segment_size = segment_size
        self.state = new_state(ineq, scale_bits)
        self.failures: list[int] = []
        self.indeterminates: list[int] = []
        self.rows: list[dict] = []
        self.stream = PrimeStream(segment_size=segment_size, max_bound=max_bound)

    def restore(self, ckpt: Checkpoint) -> None:
        row = ckpt.last
        self.state = _state_from_row(self.ineq, row)
        self.failures = list(ckpt.failures)
        self.indeterminates = list(ckpt.indeterminates)
        self.rows = list(ckpt.rows)
        self.stream = PrimeStream.from_checkpoint(
            row["n"], row["p_n"], segment_size=self.segment_size, max_bound=self.max_bound
        )

    def _next_stop(self, n: int, wave: bool) -> int:
        stops = [self.n_max]
        if self.checkpoint_every:
            stops.append((n // self.checkpoint_every + 1) * self.checkpoint_every)
        if wave:
            stops.append(n + MAX_WAVE)
        else:
            stops.append((n // self.block_size + 1) * self.block_size)
        return min(stops)

    def _resolve(self, candidates: list[int], primes_cache: dict) -> tuple[list[int], list[int]]:
        """Re-decide indeterminate n at finer scales."""
        fails, still = [], []
        for n in candidates:
            if "primes" not in primes_cache or len(primes_cache["primes"]) < n:
                primes_cache["primes"] = primes_list(
                    max(n, self.n_max), segment_size=self.segment_size,
                    max_bound=self.max_bound,
                )
            prefix = primes_cache["primes"][:n]
            state = new_state(self.ineq, self.state.scale_bits)
            state = _apply_partial(state, _partial_task(self.ineq, state.scale_bits, 1, prefix),
                                   n, prefix[-1])
            verdict = Verdict.INDETERMINATE
            bits = state.scale_bits
            while verdict is Verdict.INDETERMINATE and bits + SCALE_STEP_BITS <= MAX_SCALE_BITS:
                bits += SCALE_STEP_BITS
                state = refine_scale(state, bits, primes=prefix)
                verdict = decide(state, self.ineq).verdict
            if verdict is Verdict.FAILS:
                fails.append(n)
            elif verdict is Verdict.INDETERMINATE:
                still.append(n)
        return fails, still

    def _record(self, fails, indet, cache):
        if indet:
            extra_fails, still = self._resolve(indet, cache)
            fails = sorted(fails + extra_fails)
            self.indeterminates.extend(still)
        self.failures.extend(fails)

    def _maybe_checkpoint(self):
        n = self.state.n
        if not self.checkpoint_path or not self.checkpoint_every:
            return
        if n % self.checkpoint_every and n != self.n_max:
            return
        self.rows.append(_state_row(self.state))
        write_checkpoint(self.checkpoint_path, Checkpoint(
            inequality=self.ineq.slug, params=self.ineq.params,
            failures=self.failures, indeterminates=self.indeterminates, rows=self.rows,
        ))

    def run(self) -> None:
        cache: dict = {}
        if self.workers == 1:
            while self.state.n < self.n_max:
                stop = self._next_stop(self.state.n, wave=False)
                primes = self.stream.take(stop - self.state.n)
                self._record(*_check_block(self.ineq, self.state, primes), cache)
                self._maybe_checkpoint()
            return
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            while self.state.n < self.n_max:
                stop = self._next_stop(self.state.n, wave=True)
                start = self.state.n + 1
                primes = self.stream.take(stop - self.state.n)
                blocks = []
                k = start
                while k <= stop:
                    end = min(stop, (k - 1) // self.block_size * self.block_size + self.block_size)
                    blocks.append((k, primes[k - start:end - start + 1]))
                    k = end + 1
                scale = self.state.scale_bits
                partials = list(pool.map(
                    _partial_task, *zip(*[(self.ineq, scale, k0, chunk) for k0, chunk in blocks])
                ))
                starts = []
                running = _copy_state(self.state)
                for (k0, chunk), sums in zip(blocks, partials):
                    starts.append(_copy_state(running))
                    _apply_partial(running, sums, len(chunk), chunk[-1])
                results = list(pool.map(
                    _check_block, *zip(*[(self.ineq, st, chunk) for st, (_, chunk) in zip(starts, blocks)])
                ))
                fails = [n for f, _ in results for n in f]
                indet = [n for _, i in results for n in i]
                self.state = running
                self._record(fails, indet, cache)
                self._maybe_checkpoint()

    def certificate(self, elapsed_ms: float) -> ThresholdCertificate:
        return ThresholdCertificate(
            inequality=self.ineq.slug,
            params=self.ineq.params,
            scan_max=self.n_max,
            failures=list(self.failures),
            indeterminates=list(self.indeterminates),
            scale_bits=self.state.scale_bits,
            claimed_threshold=self.ineq.claimed_threshold,
            outside_hypothesis=self.ineq.outside_hypothesis,
            elapsed_ms=elapsed_ms,
        )


def scan(
    ineq: InequalityId,
    n_max: int,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    checkpoint_path: str | os.PathLike | None = None,
    *,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
    scale_bits: int = DEFAULT_SCALE_BITS,
    max_bound: int = DEFAULT_SIEVE_CAP,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> ThresholdCertificate:
    """Check ``ineq`` at every n in [1, n_max] and certify the observed threshold.

    ``workers > 1`` runs the two-pass block scheme in a process pool: block
    partial sums first, then per-block checks from exact prefix offsets.
    The certificate does not depend on ``workers`` or ``block_size``.
    A checkpoint row is written every ``checkpoint_every`` indices when
    ``checkpoint_path`` is given.
    """
    t0 = time.perf_counter()
    job = _Scan(ineq, n_max, checkpoint_every=checkpoint_every,
                checkpoint_path=checkpoint_path, block_size=block_size,
                workers=workers, scale_bits=scale_bits, max_bound=max_bound,
                segment_size=segment_size)
    job.run()
    return job.certificate((time.perf_counter() - t0) * 1000.0)


def resume(
    checkpoint_path: str | os.PathLike,
    ineq: InequalityId,
    n_max: int,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    *,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
    max_bound: int = DEFAULT_SIEVE_CAP,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> ThresholdCertificate:
    """Continue a scan from the last row of a checkpoint file."""
    t0 = time.perf_counter()
    ckpt = read_checkpoint(checkpoint_path)
    if ckpt.inequality != ineq.slug or ckpt.params != ineq.params:
        raise CheckpointMismatchError(
            f"checkpoint is for {ckpt.inequality} {ckpt.params}, not {ineq}"
        )
    row = ckpt.last
    if row["n"] > n_max:
        raise CheckpointMismatchError(f"checkpoint at n={row['n']} is past n_max={n_max}")
    if row["n"] < 1 or any(f > row["n"] for f in ckpt.failures + ckpt.indeterminates):
        raise CorruptCheckpointError("failure lists extend past the checkpoint row")
    from sympy import isprime

    if not isprime(row["p_n"]):
        raise CorruptCheckpointError(f"p_n = {row['p_n']} is not prime")
    job = _Scan(ineq, n_max, checkpoint_every=checkpoint_every,
                checkpoint_path=checkpoint_path, block_size=block_size,
                workers=workers, scale_bits=row["scale_bits"], max_bound=max_bound,
                segment_size=segment_size)
    job.restore(ckpt)
    job.run()
    return job.certificate((time.perf_counter() - t0) * 1000.0)

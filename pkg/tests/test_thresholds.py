import json

import pytest

from primeineq.checkpoint import CheckpointMismatchError, CorruptCheckpointError, read_checkpoint
from primeineq.exact_sums import InequalityId, Kind
from primeineq.primes import ResourceLimitError
from primeineq.thresholds import ThresholdCertificate, resume, scan

MANDL = InequalityId(Kind.MANDL)


def test_mandl_small():
    cert = scan(MANDL, 100)
    assert cert.last_failure == 8
    assert cert.threshold == 9
    assert set(range(2, 7)) <= set(cert.failures)
    assert cert.claim_status == "match" and cert.claim_holds


def test_known_thresholds():
    assert scan(InequalityId(Kind.SUN_HARMONIC), 50_000).threshold == 125
    assert scan(InequalityId(Kind.ABSTRACT_WEIGHTED), 10_000).threshold == 31
    assert scan(InequalityId(Kind.HASSANI), 10_000).threshold == 10


def test_general_three_one():
    cert = scan(InequalityId(Kind.GENERAL_FIRST, a=3, b=1), 10_000, workers=2, block_size=2500)
    assert cert.threshold == 6048
    assert cert.claim_status == "match"


def test_claim_status_values():
    c = ThresholdCertificate("mandl", {}, 100, [1, 8], claimed_threshold=9)
    assert c.claim_status == "match"
    c = ThresholdCertificate("mandl", {}, 100, [1, 3], claimed_threshold=9)
    assert c.claim_status == "claim-not-minimal" and c.claim_holds
    c = ThresholdCertificate("mandl", {}, 100, [50], claimed_threshold=9)
    assert c.claim_status == "refuted" and c.claim_holds is False
    c = ThresholdCertificate("mandl", {}, 5, [], claimed_threshold=9)
    assert c.claim_status == "beyond-scan"
    c = ThresholdCertificate("mandl", {}, 100, [1], indeterminates=[20], claimed_threshold=9)
    assert c.claim_status == "undecided" and not c.complete
    assert ThresholdCertificate("x", {}, 10, [10]).threshold is None
    assert ThresholdCertificate("x", {}, 10, []).threshold == 1


def test_failure_list_elided():
    c = ThresholdCertificate("x", {}, 1000, list(range(1, 501)))
    d = c.to_dict()
    assert d["failures"]["count"] == 500
    assert len(d["failures"]["first"]) == 100
    assert d["failure_count"] == 500


def test_outside_hypothesis_is_reported():
    ineq = InequalityId(Kind.GENERAL_FIRST, a=-2047, b=1, allow_outside_hypothesis=True)
    cert = scan(ineq, 3000)
    assert cert.outside_hypothesis
    assert cert.failures == list(range(1, 3001))
    assert cert.threshold is None
    assert cert.claim_status == "refuted"


def test_workers_and_blocks_do_not_change_certificate():
    ineq = InequalityId(Kind.SUN_HARMONIC)
    ref = scan(ineq, 20_000).canonical_json()
    assert scan(ineq, 20_000, workers=3, block_size=777).canonical_json() == ref
    assert scan(ineq, 20_000, block_size=20_000).canonical_json() == ref


def test_canonical_json_has_no_timing():
    d = json.loads(scan(MANDL, 50).canonical_json())
    assert "elapsed_ms" not in json.dumps(d)


def test_resume_matches_direct(tmp_path):
    path = tmp_path / "m.ckpt"
    direct = scan(MANDL, 10_000)
    scan(MANDL, 5000, 1000, path)
    assert read_checkpoint(path).last["n"] == 5000
    resumed = resume(path, MANDL, 10_000, 1000)
    assert resumed.canonical_json() == direct.canonical_json()
    assert read_checkpoint(path).last["n"] == 10_000


def test_resume_general_and_harmonic(tmp_path):
    for ineq in (InequalityId(Kind.SUN_HARMONIC), InequalityId(Kind.GENERAL_SECOND, b=1),
                 InequalityId(Kind.GENERAL_FIRST, a=0, b=1)):
        path = tmp_path / f"{ineq.slug}.ckpt"
        scan(ineq, 3000, 1500, path)
        assert resume(path, ineq, 6000, 1500).canonical_json() == scan(ineq, 6000).canonical_json()


def test_resume_mismatch(tmp_path):
    path = tmp_path / "w.ckpt"
    scan(InequalityId(Kind.SUN_WEIGHTED), 1000, 500, path)
    with pytest.raises(CheckpointMismatchError):
        resume(path, InequalityId(Kind.SUN_HARMONIC), 2000)
    with pytest.raises(CheckpointMismatchError):
        resume(path, InequalityId(Kind.SUN_WEIGHTED), 10)


def test_resume_truncated(tmp_path):
    path = tmp_path / "m.ckpt"
    scan(MANDL, 1000, 500, path)
    path.write_text(path.read_text()[:-10])
    with pytest.raises(CorruptCheckpointError):
        resume(path, MANDL, 2000)


def test_sieve_cap():
    with pytest.raises(ResourceLimitError):
        scan(MANDL, 10_000, max_bound=1000)


def test_checkpoint_rows_at_cadence(tmp_path):
    path = tmp_path / "c.ckpt"
    scan(MANDL, 2500, 1000, path)
    assert [r["n"] for r in read_checkpoint(path).rows] == [1000, 2000, 2500]

"""Checkpoint files for resumable scans.

Layout (UTF-8 text)::

    # primeineq checkpoint
    # inequality: sun-weighted
    # params: {}
    # failures: 1-5,7
    # indeterminates:
    n,p_n,s1,skp,h_lo,h_hi,scale_bits
    100000,1299709,<hex>,<hex>,<hex>,<hex>,64
    # sha256: <digest of every preceding line>

Accumulators are lowercase hex without a prefix; ``n``, ``p_n`` and
``scale_bits`` are decimal. General inequalities use the columns
``n,p_n,w_lo,w_hi,v_lo,v_hi,scale_bits`` instead. One row is appended per
checkpoint; the last row is the resume point and the failure lists cover
every index up to it. Files are replaced atomically, and the trailing digest
catches truncation.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

MAGIC = "# primeineq checkpoint"
BASIC_COLUMNS = ("n", "p_n", "s1", "skp", "h_lo", "h_hi", "scale_bits")
GENERAL_COLUMNS = ("n", "p_n", "w_lo", "w_hi", "v_lo", "v_hi", "scale_bits")
_DECIMAL = {"n", "p_n", "scale_bits"}


class CheckpointError(ValueError):
    pass


class CorruptCheckpointError(CheckpointError):
    pass


class CheckpointMismatchError(CheckpointError):
    pass


def encode_ranges(values: list[int]) -> str:
    """``[1, 2, 3, 7]`` -> ``"1-3,7"``."""
    parts = []
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[j] + 1:
            j += 1
        parts.append(str(values[i]) if i == j else f"{values[i]}-{values[j]}")
        i = j + 1
    return ",".join(parts)


def decode_ranges(text: str) -> list[int]:
    out: list[int] = []
    text = text.strip()
    if not text:
        return out
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        if sep:
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(lo))
    return out


@dataclass
class Checkpoint:
    inequality: str
    params: dict
    failures: list[int] = field(default_factory=list)
    indeterminates: list[int] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return GENERAL_COLUMNS if self.inequality.startswith("general") else BASIC_COLUMNS

    @property
    def last(self) -> dict:
        if not self.rows:
            raise CorruptCheckpointError("checkpoint has no rows")
        return self.rows[-1]

    def render(self) -> str:
        buf = io.StringIO()
        buf.write(f"{MAGIC}\n")
        buf.write(f"# inequality: {self.inequality}\n")
        buf.write(f"# params: {json.dumps(self.params, sort_keys=True)}\n")
        buf.write(f"# failures: {encode_ranges(self.failures)}\n")
        buf.write(f"# indeterminates: {encode_ranges(self.indeterminates)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(
                str(row[c]) if c in _DECIMAL else format(row[c], "x") for c in self.columns
            )
        body = buf.getvalue()
        digest = hashlib.sha256(body.encode()).hexdigest()
        return f"{body}# sha256: {digest}\n"


def write_checkpoint(path: str | os.PathLike, ckpt: Checkpoint) -> None:
    path = Path(path)
    text = ckpt.render()
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_checkpoint(path: str | os.PathLike) -> Checkpoint:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptCheckpointError(f"{path}: not UTF-8") from exc
    lines = text.splitlines(keepends=True)
    if not lines or not lines[0].startswith(MAGIC):
        raise CorruptCheckpointError(f"{path}: not a checkpoint file")
    last = lines[-1]
    if not last.startswith("# sha256: ") or not last.endswith("\n"):
        raise CorruptCheckpointError(f"{path}: missing digest line (truncated?)")
    body = "".join(lines[:-1])
    if hashlib.sha256(body.encode()).hexdigest() != last[len("# sha256: "):].strip():
        raise CorruptCheckpointError(f"{path}: digest mismatch")

    meta = {}
    data_lines = []
    for line in lines[1:-1]:
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
        else:
            data_lines.append(line)
    try:
        ckpt = Checkpoint(
            inequality=meta["inequality"],
            params=json.loads(meta["params"]),
            failures=decode_ranges(meta["failures"]),
            indeterminates=decode_ranges(meta["indeterminates"]),
        )
        reader = csv.reader(data_lines)
        header = tuple(next(reader))
        if header != ckpt.columns:
            raise CorruptCheckpointError(f"{path}: unexpected header {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise CorruptCheckpointError(f"{path}: row {lineno} has {len(rec)} fields")
            ckpt.rows.append(
                {c: int(v, 10 if c in _DECIMAL else 16) for c, v in zip(header, rec)}
            )
    except (KeyError, ValueError, StopIteration) as exc:
        if isinstance(exc, CorruptCheckpointError):
            raise
        raise CorruptCheckpointError(f"{path}: {exc!r}") from exc
    ckpt.last  # noqa: B018 - raises on an empty checkpoint
    return ckpt

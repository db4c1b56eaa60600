"""The BOSS representation of an order-k de Bruijn graph.

A graph is the triple ``(W, Wminus, last)`` over ``m`` positions.  Nodes are
sorted colexicographically (by their reversed k-mer) and each node owns the
run of positions that ends at the next ``last == 1``; the run lists its
outgoing labels in increasing order, or a single ``$`` (code 0) when the
node has no outgoing edge.  ``Wminus[i] == 1`` marks the edge that defines
its destination node, i.e. the one leaving the colexicographically smallest
source among all edges entering that destination.

All indices in this module are 0-based: node ranks run over ``0..n-1`` with
rank 0 being ``$^k``, and ``lf`` maps onto ``1..n-1``.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .alphabet import TERMINATOR
from .errors import (
    BadMagicError,
    InvalidGraphFileError,
    MalformedGraphError,
    TruncatedError,
    UnsupportedVersionError,
)

MAGIC = b"BOSS1\0"
VERSION = 1
HEADER = struct.Struct("<6sBBIQ")
MAX_K = 2**31 - 1


def _as_bits(values, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class BossGraph:
    """Immutable BOSS graph.

    ``W`` holds symbol codes (``0`` for ``$``), ``wminus`` and ``last`` hold
    0/1 flags, all as ``uint8`` arrays of equal length.
    """

    k: int
    sigma: int
    W: np.ndarray
    wminus: np.ndarray
    last: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "W", _as_bits(self.W, "W"))
        object.__setattr__(self, "wminus", _as_bits(self.wminus, "wminus"))
        object.__setattr__(self, "last", _as_bits(self.last, "last"))
        for arr in (self.W, self.wminus, self.last):
            arr.flags.writeable = False
        if not 1 <= self.k <= MAX_K:
            raise ValueError(f"k must be in [1, {MAX_K}], got {self.k}")
        if not 1 <= self.sigma <= 255:
            raise ValueError(f"sigma must be in [1, 255], got {self.sigma}")

    @property
    def m(self) -> int:
        return int(self.W.shape[0])

    @cached_property
    def n(self) -> int:
        return int(np.count_nonzero(self.last))

    @cached_property
    def placeholders(self) -> int:
        return int(np.count_nonzero(self.W == TERMINATOR))

    @cached_property
    def source_of(self) -> np.ndarray:
        """Node rank owning each position."""
        ranks = np.zeros(self.m, dtype=np.int64)
        if self.m > 1:
            np.cumsum(self.last[:-1], out=ranks[1:])
        return ranks

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BossGraph):
            return NotImplemented
        return (
            self.k == other.k
            and self.sigma == other.sigma
            and np.array_equal(self.W, other.W)
            and np.array_equal(self.wminus, other.wminus)
            and np.array_equal(self.last, other.last)
        )

    __hash__ = None  # type: ignore[assignment]

    def groups(self):
        """Yield ``(start, stop)`` position ranges of the node groups."""
        ends = np.flatnonzero(self.last)
        begin = 0
        for end in ends:
            yield begin, int(end) + 1
            begin = int(end) + 1

    def __repr__(self) -> str:
        return f"BossGraph(k={self.k}, sigma={self.sigma}, n={self.n}, m={self.m})"


@dataclass
class Violation:
    rule: str
    index: int | None = None

    def __str__(self) -> str:
        return self.rule if self.index is None else f"{self.rule} (at {self.index})"


def _structural_violations(g: BossGraph) -> list[Violation]:
    out: list[Violation] = []
    W, wm, last = g.W, g.wminus, g.last
    if not (len(W) == len(wm) == len(last)):
        return [Violation("arrays W, Wminus, last must have equal length")]
    m = len(W)
    if m == 0:
        return [Violation("graph must have at least one position")]
    bad = np.flatnonzero(W > g.sigma)
    if bad.size:
        out.append(Violation("symbol code exceeds sigma", int(bad[0])))
    for name, arr in (("Wminus", wm), ("last", last)):
        bad = np.flatnonzero(arr > 1)
        if bad.size:
            out.append(Violation(f"{name} entries must be 0 or 1", int(bad[0])))
    if last[-1] != 1:
        out.append(Violation("last[m] must be 1", m - 1))
    n = int(np.count_nonzero(last))
    flagged = int(np.count_nonzero(wm))
    if flagged != n - 1:
        out.append(Violation(f"in-degree count: popcount(Wminus)={flagged} must equal n-1={n - 1}"))

    is_ph = W == TERMINATOR
    bad = np.flatnonzero(is_ph & (wm != 0))
    if bad.size:
        out.append(Violation("placeholder $ must have Wminus=0", int(bad[0])))
    group_end = last.astype(bool)
    prev_end = np.ones(m, dtype=bool)
    prev_end[1:] = group_end[:-1]
    bad = np.flatnonzero(is_ph & ~(group_end & prev_end))
    if bad.size:
        out.append(Violation("placeholder $ must be the only entry of its node group", int(bad[0])))
    # labels inside a group strictly increase
    if m > 1:
        same_group = ~group_end[:-1]
        bad = np.flatnonzero(same_group & (W[1:] <= W[:-1]))
        if bad.size:
            out.append(Violation("labels within a node group must strictly increase", int(bad[0]) + 1))
    return out


def _label_violations(g: BossGraph) -> list[Violation]:
    """Reconstruct every label and check order plus the Wminus rule."""
    out: list[Violation] = []
    labels = node_labels(g)
    if labels[0] != bytes(g.k):
        out.append(Violation("first node must be $^k", 0))
    rev = [lab[::-1] for lab in labels]
    for j in range(1, len(rev)):
        if not rev[j - 1] < rev[j]:
            out.append(Violation("node labels must be strictly increasing in colex order", j))
            break
    index = {lab: j for j, lab in enumerate(labels)}
    src = g.source_of
    first_source: dict[bytes, int] = {}
    lfm = lf_map(g)
    for i in range(g.m):
        c = int(g.W[i])
        if c == TERMINATOR:
            continue
        u = int(src[i])
        target = labels[u][1:] + bytes([c])
        if target not in index:
            out.append(Violation("edge leads to a k-mer that is not a node", i))
            continue
        if g.wminus[i]:
            if index[target] != lfm[i]:
                out.append(Violation("LF destination disagrees with edge label", i))
            if target in first_source:
                out.append(Violation("destination has more than one Wminus-flagged edge", i))
            first_source.setdefault(target, i)
        elif target not in first_source:
            out.append(Violation("Wminus must flag the edge from the smallest source", i))
    return out


def validate(g: BossGraph, deep: bool = True) -> list[Violation]:
    """Return every invariant the graph breaks; an empty list means valid.

    The structural checks are linear scans.  With ``deep`` the node labels are
    also reconstructed (``O(n k)``) to check colex order and the Wminus rule.
    """
    out = _structural_violations(g)
    if not out and deep:
        out = _label_violations(g)
    return out


def _require_valid(g: BossGraph) -> None:
    problems = _structural_violations(g)
    if problems:
        raise MalformedGraphError(f"malformed graph: {problems[0]}")


def compute_C(g: BossGraph) -> np.ndarray:
    """``C[c]`` is the number of nodes whose k-mer ends with a symbol < c.

    The array has ``sigma + 2`` entries; the last one equals ``n``.
    """
    _require_valid(g)
    counts = np.bincount(g.W[g.wminus.astype(bool)], minlength=g.sigma + 1).astype(np.int64)
    C = np.zeros(g.sigma + 2, dtype=np.int64)
    C[1] = 1  # $^k
    C[2:] = 1 + np.cumsum(counts[1:])
    return C


def lf_map(g: BossGraph) -> np.ndarray:
    """Destination rank for every position; -1 where Wminus is 0."""
    C = compute_C(g)
    out = np.full(g.m, -1, dtype=np.int64)
    nxt = C[:-1].copy()
    for i in np.flatnonzero(g.wminus):
        c = g.W[i]
        out[i] = nxt[c]
        nxt[c] += 1
    return out


def lf(g: BossGraph, i: int) -> int:
    """Rank of the node reached by the Wminus-flagged edge at position ``i``."""
    if not 0 <= i < g.m:
        raise IndexError(f"position {i} out of range [0, {g.m})")
    if not g.wminus[i]:
        raise ValueError("not a destination-defining edge")
    C = compute_C(g)
    c = int(g.W[i])
    rank = int(np.count_nonzero((g.W[:i] == c) & (g.wminus[:i] == 1)))
    return int(C[c]) + rank


def label_matrix(g: BossGraph) -> np.ndarray:
    """``(n, k)`` array whose row j is the k-mer of node j."""
    lfm = lf_map(g)
    n, k = g.n, g.k
    src = np.zeros(n, dtype=np.int64)
    sym = np.zeros(n, dtype=np.uint8)
    flagged = np.flatnonzero(lfm >= 0)
    src[lfm[flagged]] = g.source_of[flagged]
    sym[lfm[flagged]] = g.W[flagged]
    M = np.zeros((n, k), dtype=np.uint8)
    M[:, k - 1] = sym
    for t in range(1, k):
        M[:, k - 1 - t] = M[src, k - t]
    M[0, :] = TERMINATOR
    return M


def node_labels(g: BossGraph) -> list[bytes]:
    return [row.tobytes() for row in label_matrix(g)]


def node_label(g: BossGraph, j: int) -> bytes:
    """k-mer of the node with rank ``j``, walking incoming edges backwards."""
    if not 0 <= j < g.n:
        raise IndexError(f"node rank {j} out of range [0, {g.n})")
    lfm = lf_map(g)
    back = {int(d): i for i, d in enumerate(lfm) if d >= 0}
    out = bytearray(g.k)
    for pos in range(g.k - 1, -1, -1):
        if j == 0:
            break
        i = back[j]
        out[pos] = g.W[i]
        j = int(g.source_of[i])
    return bytes(out)


# -- serialization -----------------------------------------------------------


def section_offsets(m: int) -> tuple[int, int, int, int]:
    """Byte offsets of the W, Wminus and last sections and the file end."""
    nb = (m + 7) // 8
    w = HEADER.size
    return w, w + m, w + m + nb, w + m + 2 * nb


def pack_bits(bits: np.ndarray) -> bytes:
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_bits(raw: bytes, count: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=count, bitorder="little")


def serialize(g: BossGraph, sink: BinaryIO) -> None:
    sink.write(HEADER.pack(MAGIC, VERSION, g.sigma, g.k, g.m))
    sink.write(g.W.tobytes())
    sink.write(pack_bits(g.wminus))
    sink.write(pack_bits(g.last))


def read_header(source: BinaryIO) -> tuple[int, int, int]:
    """Read and check a header; returns ``(sigma, k, m)``."""
    raw = source.read(HEADER.size)
    if len(raw) < len(MAGIC) or raw[: len(MAGIC)] != MAGIC:
        raise BadMagicError("bad magic: not a .boss file")
    if len(raw) < HEADER.size:
        raise TruncatedError("truncated header")
    _, version, sigma, k, m = HEADER.unpack(raw)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported .boss version {version}")
    return sigma, k, m


def deserialize(source: BinaryIO, check: bool = True) -> BossGraph:
    sigma, k, m = read_header(source)
    nb = (m + 7) // 8
    body = source.read(m + 2 * nb)
    if len(body) != m + 2 * nb:
        raise TruncatedError("truncated: section length does not match header m")
    if source.read(1):
        raise InvalidGraphFileError("trailing bytes after last section")
    W = np.frombuffer(body[:m], dtype=np.uint8).copy()
    wminus = unpack_bits(body[m : m + nb], m)
    last = unpack_bits(body[m + nb :], m)
    try:
        g = BossGraph(k, sigma, W, wminus, last)
    except ValueError as exc:
        raise InvalidGraphFileError(str(exc)) from None
    if check:
        problems = _structural_violations(g)
        if problems:
            raise InvalidGraphFileError(f"invalid graph: {problems[0]}")
    return g


def to_bytes(g: BossGraph) -> bytes:
    buf = io.BytesIO()
    serialize(g, buf)
    return buf.getvalue()


def from_bytes(raw: bytes, check: bool = True) -> BossGraph:
    return deserialize(io.BytesIO(raw), check=check)


def save(g: BossGraph, path: str | Path) -> None:
    with open(path, "wb") as fh:
        serialize(g, fh)


def load(path: str | Path, check: bool = True) -> BossGraph:
    with open(path, "rb") as fh:
        return deserialize(fh, check=check)

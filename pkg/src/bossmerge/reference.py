"""Brute-force graph construction by explicit k-mer enumeration.

This is the slow, obviously-correct path: every (k+1)-mer of every padded
string is materialised, nodes are sorted by comparing reversed k-mers, and
the BOSS arrays are read off the sorted node list.  It builds the leaves of
the construction pipeline and is the oracle the merge is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .alphabet import DNA, TERMINATOR
from .boss import BossGraph


@dataclass(frozen=True)
class StringCollection:
    """Non-empty collection of encoded strings (symbol codes ``1..sigma``)."""

    strings: tuple[bytes, ...]
    name: str | None = None

    def __post_init__(self) -> None:
        if not self.strings:
            raise ValueError("empty collection")
        for s in self.strings:
            if not s:
                raise ValueError("collection strings must be non-empty")
            if TERMINATOR in s:
                raise ValueError("collection strings must not contain the terminator")

    @classmethod
    def of(cls, strings: Iterable[bytes | str], name: str | None = None) -> "StringCollection":
        """Build from encoded strings; ``str`` items are encoded as DNA."""
        return cls(tuple(DNA.encode(s) if isinstance(s, str) else bytes(s) for s in strings), name)

    def __iter__(self):
        return iter(self.strings)

    def __len__(self) -> int:
        return len(self.strings)

    def union(self, other: "StringCollection") -> "StringCollection":
        return StringCollection(self.strings + other.strings)

    def max_symbol(self) -> int:
        return max(max(s) for s in self.strings)


def _collection(S) -> StringCollection:
    return S if isinstance(S, StringCollection) else StringCollection.of(S)


def extract_edges(S, k: int) -> set[bytes]:
    """All distinct (k+1)-mers of the strings after prepending ``$^k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    S = _collection(S)
    pad = bytes(k)
    edges: set[bytes] = set()
    for s in S:
        t = pad + s
        edges.update(t[i : i + k + 1] for i in range(len(s)))
    return edges


def colex_cmp(a: bytes, b: bytes) -> int:
    """Compare two k-mers by their reversals: -1, 0 or 1."""
    if len(a) != len(b):
        raise ValueError("k-mers must have equal length")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def colex_key(kmer: bytes) -> bytes:
    """Sort key equivalent to :func:`colex_cmp` for k-mers of one length."""
    return kmer[::-1]


def _nodes_and_out(edges: set[bytes], k: int) -> tuple[list[bytes], dict[bytes, list[int]]]:
    out: dict[bytes, set[int]] = {bytes(k): set()}
    for e in edges:
        out.setdefault(e[:k], set()).add(e[k])
        out.setdefault(e[1:], set())
    nodes = sorted(out, key=colex_key)
    return nodes, {v: sorted(s) for v, s in out.items()}


@dataclass
class _Layout:
    nodes: list[bytes]
    out: dict[bytes, list[int]]
    W: list[int]
    wminus: list[int]
    last: list[int]
    edge_of_row: list[bytes | None]


def _layout(S, k: int) -> _Layout:
    edges = extract_edges(S, k)
    nodes, out = _nodes_and_out(edges, k)
    W: list[int] = []
    wminus: list[int] = []
    last: list[int] = []
    rows: list[bytes | None] = []
    reached: set[bytes] = set()
    # nodes are visited in colex order, so the first source seen for a
    # destination is the smallest one
    for v in nodes:
        labels = out[v]
        if not labels:
            W.append(TERMINATOR)
            wminus.append(0)
            last.append(1)
            rows.append(None)
            continue
        for t, c in enumerate(labels):
            dest = v[1:] + bytes([c])
            W.append(c)
            wminus.append(0 if dest in reached else 1)
            reached.add(dest)
            last.append(1 if t == len(labels) - 1 else 0)
            rows.append(v + bytes([c]))
    return _Layout(nodes, out, W, wminus, last, rows)


def _check_sigma(S: StringCollection, sigma: int) -> None:
    if S.max_symbol() > sigma:
        raise ValueError(f"symbol {S.max_symbol()} exceeds sigma={sigma}")


def build_boss(S, k: int, sigma: int = DNA.sigma) -> BossGraph:
    """BOSS graph of a collection over an alphabet of size ``sigma``."""
    S = _collection(S)
    _check_sigma(S, sigma)
    lay = _layout(S, k)
    return BossGraph(k, sigma, np.array(lay.W, dtype=np.uint8),
                     np.array(lay.wminus, dtype=np.uint8), np.array(lay.last, dtype=np.uint8))


@dataclass(eq=False)
class ColorMatrix:
    """Edge-by-color bit matrix; row i holds the colors of position i."""

    bits: np.ndarray  # (m, c) bool

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError("color matrix must be two-dimensional")

    @property
    def rows(self) -> int:
        return int(self.bits.shape[0])

    @property
    def colors(self) -> int:
        return int(self.bits.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorMatrix):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def row_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.bits]


def build_colored(collections: Sequence, k: int, sigma: int = DNA.sigma) -> tuple[BossGraph, ColorMatrix]:
    """Union graph plus one color column per input collection."""
    if not collections:
        raise ValueError("empty input")
    cols = [_collection(S) for S in collections]
    union = StringCollection(tuple(s for S in cols for s in S))
    _check_sigma(union, sigma)
    lay = _layout(union, k)
    per_color = [extract_edges(S, k) for S in cols]
    bits = np.zeros((len(lay.W), len(cols)), dtype=bool)
    for i, e in enumerate(lay.edge_of_row):
        if e is None:
            continue
        for j, edges in enumerate(per_color):
            bits[i, j] = e in edges
    g = BossGraph(k, sigma, np.array(lay.W, dtype=np.uint8),
                  np.array(lay.wminus, dtype=np.uint8), np.array(lay.last, dtype=np.uint8))
    return g, ColorMatrix(bits)


def lcp(a: bytes, b: bytes) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def build_lcs(S, k: int) -> np.ndarray:
    """Longest common suffix of each node's k-mer with its predecessor's.

    Entry 0 is 0 by convention.
    """
    edges = extract_edges(S, k)
    nodes, _ = _nodes_and_out(edges, k)
    out = np.zeros(len(nodes), dtype=np.int64)
    for j in range(1, len(nodes)):
        out[j] = lcp(nodes[j - 1][::-1], nodes[j][::-1])
    return out


def sorted_nodes(S, k: int) -> list[bytes]:
    """Node k-mers in colex order."""
    nodes, _ = _nodes_and_out(extract_edges(S, k), k)
    return nodes

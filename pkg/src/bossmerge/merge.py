"""Merging two BOSS graphs without reconstructing their k-mers.

The merge runs in three phases.  Phase 1 computes a bit vector ``Z`` that
interleaves the nodes of the two inputs in colex order; it starts from the
order given by the last symbol alone and refines it one symbol per pass,
``k - 1`` passes in total, by following the Wminus-flagged edges.  Phase 2
runs alongside and records in ``B`` where blocks of equal reversed prefixes
begin, which tells the final pass which adjacent nodes carry the same k-mer.
Phase 3 walks ``Z`` once and writes the union graph.

In the compact mode ``B`` is kept as two bits per entry (``B2``), so the
working space is ``4 (n0 + n1)`` bits for ``Z``/``Z'``/``B2`` plus three
symbol-indexed word arrays.  The full mode keeps ``B`` as 32-bit integers;
those values are the LCS array of the union graph.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels as K
from .boss import BossGraph, label_matrix
from .errors import GraphCountMismatchError, IncompatibleGraphsError, MalformedGraphError
from .reference import ColorMatrix

logger = logging.getLogger(__name__)

WORD_BITS = 64


class Mode(enum.Enum):
    COMPACT = "compact"
    FULL_B = "full"


class BClass(enum.Enum):
    """What a two-bit boundary code means at a given moment."""

    ZERO = "B=0"
    EQ_H = "B=h"
    EQ_HMINUS1 = "B=h-1"
    LT_HMINUS1 = "0<B<h-1"
    MERGE = "B=0 (same k-mer)"
    LCP_KMINUS1 = "B=k"
    SMALL = "0<B<k"


def b2_code_for(h: int) -> int:
    """Code stored when an entry is set to ``h`` during pass ``h``."""
    return 2 if h % 2 == 0 else 1


def b2_read(code: int, h: int, final: bool = False) -> BClass:
    """Decode a two-bit boundary entry.

    While scanning in pass ``h``, 0 is an unset entry, 3 is any value below
    ``h - 1`` and codes 1/2 swap meaning with the parity of ``h``.  After
    the last pass (``final=True``, ``h == k``) only 0, 3 and the code of
    ``k`` can occur.
    """
    if code not in (0, 1, 2, 3):
        raise ValueError(f"not a two-bit code: {code}")
    if final:
        if code == 0:
            return BClass.MERGE
        if code == 3:
            return BClass.SMALL
        return BClass.LCP_KMINUS1
    if code == 0:
        return BClass.ZERO
    if code == 3:
        return BClass.LT_HMINUS1
    return BClass.EQ_H if code == b2_code_for(h) else BClass.EQ_HMINUS1


def final_class_of_b(value: int, k: int) -> BClass:
    if value == 0:
        return BClass.MERGE
    return BClass.LCP_KMINUS1 if value == k else BClass.SMALL


@dataclass
class WorkspaceMeter:
    """Tracks auxiliary memory the engine allocates, in bits and words."""

    bits: int = 0
    words: int = 0
    peak_bits: int = 0
    peak_words: int = 0
    items: dict[str, tuple[int, int]] = field(default_factory=dict)

    def alloc(self, name: str, *, bits: int = 0, words: int = 0) -> None:
        if name in self.items:
            raise RuntimeError(f"{name} allocated twice")
        self.items[name] = (bits, words)
        self.bits += bits
        self.words += words
        self.peak_bits = max(self.peak_bits, self.bits)
        self.peak_words = max(self.peak_words, self.words)

    def free(self, name: str) -> None:
        bits, words = self.items.pop(name)
        self.bits -= bits
        self.words -= words


@dataclass
class MergeStats:
    steps: int = 0
    edge_reads: int = 0
    iterations: int = 0
    meter: WorkspaceMeter = field(default_factory=WorkspaceMeter)

    @property
    def aux_bits(self) -> int:
        return self.meter.peak_bits

    @property
    def aux_words(self) -> int:
        return self.meter.peak_words


def _zeros_bits(nbits: int) -> np.ndarray:
    return np.zeros((nbits + 7) // 8, dtype=np.uint8)


def _zeros_b2(n: int) -> np.ndarray:
    return np.zeros((n + 3) // 4, dtype=np.uint8)


def unpack_z(packed: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(packed, count=n, bitorder="little")


def unpack_b2(packed: np.ndarray, n: int) -> np.ndarray:
    q = np.arange(n)
    return (packed[q >> 2] >> (2 * (q & 3))) & 3


_EMPTY_U8 = np.zeros(1, dtype=np.uint8)
_EMPTY_I32 = np.zeros(1, dtype=np.int32)


@dataclass
class MergeState:
    """Everything one merge keeps between passes.

    ``zprev`` is ``Z^h`` once pass ``h`` has finished (``Z^1`` after
    :func:`init_merge`).  ``start`` and ``F`` are indexed by symbol, entry 0
    unused; ``start[c]`` is the 0-based first position of the subarray of
    nodes whose k-mer ends in ``c``.
    """

    g0: BossGraph
    g1: BossGraph
    mode: Mode
    h: int
    zprev: np.ndarray
    zcur: np.ndarray
    b2: np.ndarray
    bfull: np.ndarray
    F: np.ndarray
    start: np.ndarray
    block_id: np.ndarray
    stats: MergeStats

    @property
    def n(self) -> int:
        return self.g0.n + self.g1.n

    @property
    def k(self) -> int:
        return self.g0.k

    @property
    def sigma(self) -> int:
        return self.g0.sigma

    def z(self) -> np.ndarray:
        """Current ``Z`` as an unpacked 0/1 array."""
        return unpack_z(self.zprev, self.n)

    def boundaries(self) -> np.ndarray:
        """Current B2 codes (compact) or B values (full), unpacked."""
        if self.mode is Mode.FULL_B:
            return self.bfull.copy()
        return unpack_b2(self.b2, self.n)

    def partition_sizes(self) -> np.ndarray:
        ends = np.append(self.start[2:], self.n)
        return ends - self.start[1:]


def check_compatible(g0: BossGraph, g1: BossGraph) -> None:
    if g0.k != g1.k or g0.sigma != g1.sigma:
        raise IncompatibleGraphsError(
            f"incompatible graphs: k={g0.k}/{g1.k}, sigma={g0.sigma}/{g1.sigma}"
        )


def init_merge(g0: BossGraph, g1: BossGraph, mode: Mode = Mode.COMPACT) -> MergeState:
    """Lay out ``Z^1`` and the initial boundaries from per-symbol node counts."""
    check_compatible(g0, g1)
    sigma = g0.sigma
    n0, n1 = g0.n, g1.n
    n = n0 + n1
    stats = MergeStats()
    meter = stats.meter
    # the per-graph counts borrow F and block_id before they take their roles
    F = np.zeros(sigma + 1, dtype=np.int64)
    start = np.zeros(sigma + 1, dtype=np.int64)
    block_id = np.zeros(sigma + 1, dtype=np.int64)
    meter.alloc("F", words=sigma + 1)
    meter.alloc("start", words=sigma + 1)
    meter.alloc("block_id", words=sigma + 1)
    K.count_flagged(g0.W, g0.wminus, F)
    K.count_flagged(g1.W, g1.wminus, block_id)
    if 1 + F[1:].sum() != n0 or 1 + block_id[1:].sum() != n1:
        raise MalformedGraphError("malformed graph: flagged edges do not match node count")

    zprev = _zeros_bits(n)
    zcur = _zeros_bits(n)
    meter.alloc("Zprev", bits=n)
    meter.alloc("Zcur", bits=n)
    if mode is Mode.COMPACT:
        b2 = _zeros_b2(n)
        bfull = _EMPTY_I32
        meter.alloc("B2", bits=2 * n)
    else:
        b2 = _EMPTY_U8
        bfull = np.zeros(n, dtype=np.int32)  # output, not working space

    # Z^1 = 01 . 0^l0(1) 1^l1(1) ... ; B = 10 . 1 0^(l(c)-1) ...
    z = np.zeros(n, dtype=np.uint8)
    z[1] = 1
    pos = 2
    first = 1  # code of B=1 while scanning in pass 2
    if mode is Mode.COMPACT:
        K.put2(b2, 0, first)
    else:
        bfull[0] = 1
    for c in range(1, sigma + 1):
        l0, l1 = int(F[c]), int(block_id[c])
        start[c] = pos
        if l0 + l1:
            if mode is Mode.COMPACT:
                K.put2(b2, pos, first)
            else:
                bfull[pos] = 1
        z[pos + l0 : pos + l0 + l1] = 1
        pos += l0 + l1
    zprev[:] = np.packbits(z, bitorder="little")
    del z
    F[:] = start
    block_id[:] = -1
    return MergeState(g0, g1, mode, 1, zprev, zcur, b2, bfull, F, start, block_id, stats)


_ERRORS = {
    K.OVERRUN: "graph/count mismatch: cursor ran past the end of an input",
    K.UNCONSUMED: "graph/count mismatch: input not fully consumed",
    K.PARTITION_OVERFLOW: "graph/count mismatch: symbol subarray overflow",
    K.BAD_MERGE: "graph/count mismatch: inconsistent merge plan",
}


def merge_iteration(state: MergeState) -> MergeState:
    """Run pass ``h = state.h + 1``: compute ``Z^h`` and refine the blocks."""
    h = state.h + 1
    if h > state.k:
        raise ValueError(f"all {state.k - 1} passes already done")
    counters = np.zeros(2, dtype=np.int64)
    g0, g1 = state.g0, state.g1
    err = K.merge_pass(
        h, g0.W, g0.wminus, g0.last, g1.W, g1.wminus, g1.last,
        state.zprev, state.zcur, state.b2, state.bfull, state.mode is Mode.FULL_B,
        state.F, state.start, state.block_id, state.n, counters,
    )
    state.stats.steps += int(counters[0])
    state.stats.edge_reads += int(counters[1])
    if err != K.OK:
        raise GraphCountMismatchError(_ERRORS[err])
    state.zprev, state.zcur = state.zcur, state.zprev
    state.h = h
    state.stats.iterations += 1
    return state


@dataclass
class MergePlan:
    """Final interleaving ``zk`` plus the boundary array it came with."""

    zk: np.ndarray  # packed bits
    mode: Mode
    b2: np.ndarray
    bfull: np.ndarray
    n0: int
    n1: int
    m0: int
    m1: int
    k: int
    sigma: int
    stats: MergeStats

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    def z(self) -> np.ndarray:
        return unpack_z(self.zk, self.n)

    def classes(self) -> list[BClass]:
        if self.mode is Mode.FULL_B:
            return [final_class_of_b(int(v), self.k) for v in self.bfull]
        return [b2_read(int(c), self.k, final=True) for c in unpack_b2(self.b2, self.n)]


def run_merge(
    g0: BossGraph,
    g1: BossGraph,
    mode: Mode = Mode.COMPACT,
    on_iteration: Callable[[MergeState], None] | None = None,
) -> MergePlan:
    """Phases 1 and 2: ``k - 1`` refinement passes.

    ``on_iteration`` is called with the state after initialisation and after
    every pass; tests use it to inspect each ``Z^h``.
    """
    state = init_merge(g0, g1, mode)
    if on_iteration is not None:
        on_iteration(state)
    while state.h < state.k:
        merge_iteration(state)
        if on_iteration is not None:
            on_iteration(state)
    meter = state.stats.meter
    meter.free("Zcur")
    for name in ("F", "start", "block_id"):
        meter.free(name)
    logger.debug("merged n=%d k=%d in %d passes", state.n, state.k, state.stats.iterations)
    return MergePlan(
        state.zprev, mode, state.b2, state.bfull, g0.n, g1.n, g0.m, g1.m,
        g0.k, g0.sigma, state.stats,
    )


@dataclass
class _Emitted:
    graph: BossGraph
    src0: np.ndarray
    src1: np.ndarray
    lcs: np.ndarray | None


def _emit(g0: BossGraph, g1: BossGraph, plan: MergePlan, want_lcs: bool) -> _Emitted:
    check_compatible(g0, g1)
    if (g0.n, g1.n, g0.m, g1.m) != (plan.n0, plan.n1, plan.m0, plan.m1) or g0.k != plan.k:
        raise ValueError("inconsistent plan/graph sizes")
    if want_lcs and plan.mode is not Mode.FULL_B:
        raise ValueError("LCS requires full boundary array")
    cap = g0.m + g1.m
    outW = np.zeros(cap, dtype=np.uint8)
    outWm = np.zeros(cap, dtype=np.uint8)
    outLast = np.zeros(cap, dtype=np.uint8)
    src0 = np.zeros(cap, dtype=np.int64)
    src1 = np.zeros(cap, dtype=np.int64)
    lcs = np.zeros(plan.n if want_lcs else 1, dtype=np.int64)
    seen = np.zeros(plan.sigma + 1, dtype=np.int64)
    plan.stats.meter.alloc("seen", words=plan.sigma + 1)
    counts = np.zeros(2, dtype=np.int64)
    err = K.emit_pass(
        plan.k, g0.W, g0.wminus, g0.last, g1.W, g1.wminus, g1.last,
        plan.zk, plan.b2, plan.bfull, plan.mode is Mode.FULL_B, plan.n,
        seen, outW, outWm, outLast, src0, src1, lcs, want_lcs, counts,
    )
    plan.stats.meter.free("seen")
    if err != K.OK:
        raise GraphCountMismatchError(_ERRORS[err])
    m, nodes = int(counts[0]), int(counts[1])
    g = BossGraph(plan.k, plan.sigma, outW[:m], outWm[:m], outLast[:m])
    return _Emitted(g, src0[:m], src1[:m], lcs[:nodes] if want_lcs else None)


def emit_union(g0: BossGraph, g1: BossGraph, plan: MergePlan) -> BossGraph:
    """Phase 3: the BOSS graph of the union."""
    return _emit(g0, g1, plan, want_lcs=False).graph


def emit_lcs(g0: BossGraph, g1: BossGraph, plan: MergePlan) -> np.ndarray:
    """LCS array of the union graph, read off a full-mode plan."""
    if plan.mode is not Mode.FULL_B:
        raise ValueError("LCS requires full boundary array")
    return _emit(g0, g1, plan, want_lcs=True).lcs


def merge_colors(em: _Emitted, M0: ColorMatrix, M1: ColorMatrix) -> ColorMatrix:
    c0 = M0.colors
    m = em.graph.m
    bits = np.zeros((m, c0 + M1.colors), dtype=bool)
    has0 = em.src0 >= 0
    has1 = em.src1 >= 0
    bits[has0, :c0] = M0.bits[em.src0[has0]]
    bits[has1, c0:] = M1.bits[em.src1[has1]]
    return ColorMatrix(bits)


def merge_colored(
    g0: BossGraph, M0: ColorMatrix, g1: BossGraph, M1: ColorMatrix, plan: MergePlan
) -> tuple[BossGraph, ColorMatrix]:
    """Union graph and color matrix; colors of ``g1`` are shifted by ``M0.colors``.

    An edge present in both inputs gets the OR of its two rows.
    """
    if M0.rows != g0.m or M1.rows != g1.m:
        raise ValueError("row-count mismatch between color matrix and graph")
    em = _emit(g0, g1, plan, want_lcs=False)
    return em.graph, merge_colors(em, M0, M1)


@dataclass
class MergeResult:
    graph: BossGraph
    colors: ColorMatrix | None = None
    lcs: np.ndarray | None = None
    stats: MergeStats | None = None


def merge(
    g0: BossGraph,
    g1: BossGraph,
    *,
    colors: tuple[ColorMatrix, ColorMatrix] | None = None,
    lcs: bool = False,
) -> MergeResult:
    """Plan and emit in one call; ``lcs`` switches to the full mode."""
    plan = run_merge(g0, g1, Mode.FULL_B if lcs else Mode.COMPACT)
    if colors is not None:
        M0, M1 = colors
        if M0.rows != g0.m or M1.rows != g1.m:
            raise ValueError("row-count mismatch between color matrix and graph")
    em = _emit(g0, g1, plan, want_lcs=lcs)
    cm = merge_colors(em, *colors) if colors is not None else None
    return MergeResult(em.graph, cm, em.lcs, plan.stats)


def merge_many(graphs: list[BossGraph], *, lcs: bool = False) -> MergeResult:
    """Union of any number of graphs by a balanced tree of pairwise merges.

    Only the root merge runs in full mode when ``lcs`` is requested.
    """
    if not graphs:
        raise ValueError("nothing to merge")
    level = list(graphs)
    if len(level) == 1:
        g = level[0]
        return MergeResult(g, lcs=lcs_of_graph(g) if lcs else None)
    while len(level) > 2:
        nxt = [merge(level[i], level[i + 1]).graph for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return merge(level[0], level[1], lcs=lcs)


def lcs_of_graph(g: BossGraph) -> np.ndarray:
    """LCS array of a single graph, from its reconstructed node labels."""
    rev = label_matrix(g)[:, ::-1]
    out = np.zeros(g.n, dtype=np.int64)
    if g.n > 1:
        same = rev[1:] == rev[:-1]
        differs = ~same
        first_diff = np.where(differs.any(axis=1), differs.argmax(axis=1), g.k)
        out[1:] = first_diff
    return out

"""Collection -> graph construction through leaves and a tree of stream merges.

The input strings are cut into subcollections of at most ``mem_budget / 8``
input bytes.  Each one is built in RAM by the reference builder and written
to ``leaf_<i>.boss``; the leaves are then merged pairwise, round by round,
into ``round<r>_<j>.boss`` until one graph is left.
"""

from __future__ import annotations

import logging
import math
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import boss, formats
from .alphabet import DNA, Alphabet, read_sequences
from .merge import Mode
from .reference import StringCollection, build_boss, build_colored, build_lcs
from .streams import (
    DEFAULT_BUFFER,
    BufferBudget,
    ByteWriter,
    ColorRowReader,
    IOStats,
    stream_merge,
)

logger = logging.getLogger(__name__)

LEAF_FOOTPRINT = 8


class BudgetTooSmallError(ValueError):
    pass


@dataclass
class Leaf:
    strings: list[bytes]
    color: int  # index of the input file (only meaningful in colored mode)


@dataclass
class PipelineResult:
    graph_path: Path
    colors_path: Path | None
    lcs_path: Path | None
    leaves: int
    rounds: int
    merges: list[dict] = field(default_factory=list)


def split_leaves(
    inputs: Sequence[str | Path], mem_budget: int, alphabet: Alphabet = DNA, by_file: bool = False
) -> list[Leaf]:
    """Group the input strings into subcollections of at most ``mem_budget/8`` bytes.

    With ``by_file`` a leaf never mixes strings from two input files.
    """
    cap = mem_budget // LEAF_FOOTPRINT
    leaves: list[Leaf] = []
    cur: list[bytes] = []
    size = 0
    color = 0
    for fi, path in enumerate(inputs):
        if by_file and cur:
            leaves.append(Leaf(cur, color))
            cur, size = [], 0
        color = fi
        for s in read_sequences(path, alphabet):
            if len(s) > cap:
                raise BudgetTooSmallError(
                    f"memory budget {mem_budget} too small for a string of length {len(s)}"
                )
            if size + len(s) > cap and cur:
                leaves.append(Leaf(cur, color))
                cur, size = [], 0
            cur.append(s)
            size += len(s)
    if cur:
        leaves.append(Leaf(cur, color))
    if not leaves:
        raise ValueError("no input strings")
    return leaves


def merge_rounds(leaves: int) -> int:
    return math.ceil(math.log2(leaves)) if leaves > 1 else 0


def _merge_job(args) -> dict:
    a, b, out, mode, buffer_bytes, colors, colors_out, lcs_out, workdir = args
    st = stream_merge(a, b, out, mode, buffer_bytes, colors=colors, colors_out=colors_out,
                      lcs_out=lcs_out, workdir=workdir)
    return {"output": str(out), **vars(st)}


def _fold_colors(src: Path, dst: Path, groups: list[int], ncolors: int, buffer_bytes: int) -> None:
    """OR together the columns that belong to the same input file."""
    stats, budget = IOStats(), BufferBudget()
    r = ColorRowReader(src, buffer_bytes, stats, budget)
    w = ByteWriter(dst, buffer_bytes, stats, budget)
    w.write(formats.COLORS_HEADER.pack(formats.COLORS_MAGIC, r.rows, ncolors))
    rb = formats.row_bytes(ncolors)
    for _ in range(r.rows):
        row = r.next()
        out = 0
        col = 0
        while row:
            if row & 1:
                out |= 1 << groups[col]
            row >>= 1
            col += 1
        w.write(out.to_bytes(rb, "little"))
    r.close()
    w.close()


def build_pipeline(
    inputs: Sequence[str | Path],
    k: int,
    mem_budget: int,
    workdir: str | Path,
    *,
    output: str | Path | None = None,
    alphabet: Alphabet = DNA,
    colored: bool = False,
    lcs: bool = False,
    keep_intermediates: bool = False,
    buffer_bytes: int = DEFAULT_BUFFER,
    jobs: int = 1,
) -> PipelineResult:
    """Build the order-k graph of all strings in ``inputs``.

    Colored mode gives each input file one color; LCS mode runs only the
    last merge with the full boundary array.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mem_budget <= 0:
        raise ValueError("mem_budget must be positive")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    output = Path(output) if output is not None else workdir / "final.boss"
    sigma = alphabet.sigma

    leaves = split_leaves(inputs, mem_budget, alphabet, by_file=colored)
    logger.info("%d leaves from %d input files", len(leaves), len(inputs))
    level: list[tuple[Path, Path | None]] = []
    for i, leaf in enumerate(leaves):
        path = workdir / f"leaf_{i}.boss"
        cpath = None
        S = StringCollection(tuple(leaf.strings))
        if colored:
            g, M = build_colored([S], k, sigma)
            cpath = workdir / f"leaf_{i}.colors"
            formats.save_colors(M, cpath)
        else:
            g = build_boss(S, k, sigma)
        boss.save(g, path)
        level.append((path, cpath))

    rounds = merge_rounds(len(leaves))
    result = PipelineResult(output, None, None, len(leaves), rounds)
    lcs_path = output.with_suffix(".lcs") if lcs else None
    if len(level) == 1:
        shutil.copyfile(level[0][0], output)
        if lcs:
            S = StringCollection(tuple(leaves[0].strings))
            formats.save_lcs(build_lcs(S, k), lcs_path)
    r = 0
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while len(level) > 1:
            r += 1
            last_round = len(level) == 2
            jobs_args = []
            nxt: list[tuple[Path, Path | None]] = []
            for j in range(0, len(level) - 1, 2):
                (a, ca), (b, cb) = level[j], level[j + 1]
                out = output if last_round else workdir / f"round{r}_{j // 2}.boss"
                cout = workdir / f"round{r}_{j // 2}.colors" if colored else None
                use_full = lcs and last_round
                jobs_args.append((
                    a, b, out, Mode.FULL_B if use_full else Mode.COMPACT, buffer_bytes,
                    (ca, cb) if colored else None, cout, lcs_path if use_full else None, workdir,
                ))
                nxt.append((out, cout))
            if len(level) % 2:
                nxt.append(level[-1])
            if pool is not None:
                stats = list(pool.map(_merge_job, jobs_args))
            else:
                stats = [_merge_job(a) for a in jobs_args]
            result.merges.extend(dict(s, round=r) for s in stats)
            if not keep_intermediates:
                for j in range(0, len(level) - 1, 2):
                    for p in (*level[j], *level[j + 1]):
                        if p is not None:
                            Path(p).unlink(missing_ok=True)
            level = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    assert r == rounds

    if colored:
        result.colors_path = output.with_suffix(".colors")
        groups = [leaf.color for leaf in leaves]
        _fold_colors(level[0][1], result.colors_path, groups, len(inputs), buffer_bytes)
    result.lcs_path = lcs_path
    if not keep_intermediates:
        for p in level[0]:
            if p is not None and Path(p) != output:
                Path(p).unlink(missing_ok=True)
    return result

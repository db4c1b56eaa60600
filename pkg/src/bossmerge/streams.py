"""External-memory merge: every array is a file read or written sequentially.

Inputs are ``.boss`` files; each pass opens fresh readers on their three
sections.  The merge state lives in one *work file* holding, per position,
the two-bit boundary code plus two Z bits (one per pass parity), packed two
entries per byte.  In full mode an entry is five bytes: a Z byte and the
u32 boundary value.  The work file is laid out as ``sigma + 1`` byte-aligned
partitions, the pair of ``$^k`` nodes first and then one partition per
symbol; positions never move between partitions, so the layout is fixed for
the whole merge.

During a pass one reader scans the work file front to back (``Z^(h-1)`` and
the block starts) while each symbol partition has its own cursor that
rewrites entries in place, strictly left to right, through a read handle and
a write handle that share one buffer.  The scanning reader may see an entry
before or after its cursor rewrote it; both views classify block starts the
same way because a new mark only ever replaces 0, and the demotion of the
previous pass's marks happens in the cursor.

All handles are :class:`TrackedFile` objects, which refuse to move
backwards and count the bytes they move.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import boss
from .errors import (
    BadMagicError,
    BossError,
    GraphCountMismatchError,
    IncompatibleGraphsError,
    TruncatedError,
)
from .formats import COLORS_HEADER, COLORS_MAGIC, LCS_HEADER, LCS_MAGIC, row_bytes
from .merge import Mode, b2_code_for

logger = logging.getLogger(__name__)

DEFAULT_BUFFER = 1 << 16


class BackwardSeekError(BossError):
    """A tracked handle was asked to move to an earlier offset."""


@dataclass
class IOStats:
    bytes_read: int = 0
    bytes_written: int = 0
    backward_seeks: int = 0
    handles: int = 0

    def total(self) -> int:
        return self.bytes_read + self.bytes_written


@dataclass
class BufferBudget:
    """Bytes of RAM held in stream buffers, with the high-water mark."""

    current: int = 0
    peak: int = 0
    buffers: int = 0
    peak_buffers: int = 0

    def take(self, nbytes: int) -> None:
        self.current += nbytes
        self.buffers += 1
        self.peak = max(self.peak, self.current)
        self.peak_buffers = max(self.peak_buffers, self.buffers)

    def give(self, nbytes: int) -> None:
        self.current -= nbytes
        self.buffers -= 1


class TrackedFile:
    """Unbuffered file handle that only moves forward."""

    def __init__(self, path, mode: str, stats: IOStats, offset: int = 0) -> None:
        self._fh = open(path, mode, buffering=0)
        self.stats = stats
        self.pos = 0
        stats.handles += 1
        if offset:
            self.seek(offset)

    def seek(self, offset: int) -> None:
        if offset < self.pos:
            self.stats.backward_seeks += 1
            raise BackwardSeekError(f"backward seek {self.pos} -> {offset}")
        self._fh.seek(offset)
        self.pos = offset

    def read(self, n: int) -> bytes:
        parts = []
        got = 0
        while got < n:
            data = self._fh.read(n - got)
            if not data:
                break
            parts.append(data)
            got += len(data)
        self.pos += got
        self.stats.bytes_read += got
        return b"".join(parts)

    def write(self, data) -> None:
        view = memoryview(data)
        while view:
            w = self._fh.write(view)
            view = view[w:]
        self.pos += len(data)
        self.stats.bytes_written += len(data)

    def close(self) -> None:
        self._fh.close()


class ByteReader:
    def __init__(self, path, offset: int, length: int, bufsize: int, stats: IOStats, budget: BufferBudget):
        self._f = TrackedFile(path, "rb", stats, offset)
        self._remaining = length
        self._bufsize = bufsize
        self._budget = budget
        budget.take(bufsize)
        self._buf = b""
        self._i = 0

    def _refill(self) -> None:
        n = min(self._bufsize, self._remaining)
        if n == 0:
            raise GraphCountMismatchError("graph/count mismatch: read past end of section")
        data = self._f.read(n)
        if len(data) != n:
            raise TruncatedError("truncated: stream ended early")
        self._remaining -= n
        self._buf = data
        self._i = 0

    def read_byte(self) -> int:
        if self._i >= len(self._buf):
            self._refill()
        v = self._buf[self._i]
        self._i += 1
        return v

    def read(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            if self._i >= len(self._buf):
                self._refill()
            take = min(n - len(out), len(self._buf) - self._i)
            out += self._buf[self._i : self._i + take]
            self._i += take
        return bytes(out)

    def exhausted(self) -> bool:
        return self._remaining == 0 and self._i >= len(self._buf)

    def close(self) -> None:
        self._f.close()
        self._budget.give(self._bufsize)


class BitReader(ByteReader):
    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        self._byte = 0
        self._bit = 8

    def read_bit(self) -> int:
        if self._bit == 8:
            self._byte = self.read_byte()
            self._bit = 0
        b = (self._byte >> self._bit) & 1
        self._bit += 1
        return b


class ByteWriter:
    def __init__(self, path, bufsize: int, stats: IOStats, budget: BufferBudget, mode: str = "wb", offset: int = 0):
        self._f = TrackedFile(path, mode, stats, offset)
        self._bufsize = bufsize
        self._budget = budget
        budget.take(bufsize)
        self._buf = bytearray()
        self.count = 0

    def write_byte(self, v: int) -> None:
        self._buf.append(v)
        self.count += 1
        if len(self._buf) >= self._bufsize:
            self.flush()

    def write(self, data: bytes) -> None:
        self._buf += data
        self.count += len(data)
        if len(self._buf) >= self._bufsize:
            self.flush()

    def flush(self) -> None:
        if self._buf:
            self._f.write(self._buf)
            self._buf = bytearray()

    def close(self) -> None:
        self.flush()
        self._f.close()
        self._budget.give(self._bufsize)


class BitWriter(ByteWriter):
    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        self._acc = 0
        self._nbits = 0
        self.bits = 0

    def write_bit(self, b: int) -> None:
        self._acc |= b << self._nbits
        self._nbits += 1
        self.bits += 1
        if self._nbits == 8:
            self.write_byte(self._acc)
            self._acc = 0
            self._nbits = 0

    def close(self) -> None:
        if self._nbits:
            self.write_byte(self._acc)
            self._acc = 0
            self._nbits = 0
        super().close()


def read_boss_header(path, stats: IOStats) -> tuple[int, int, int]:
    f = TrackedFile(path, "rb", stats)
    try:
        return boss.read_header(f)
    finally:
        f.close()


class GraphReader:
    """Sequential reader of the positions of a ``.boss`` file."""

    def __init__(self, path, bufsize: int, stats: IOStats, budget: BufferBudget, wminus_only: bool = False):
        self.sigma, self.k, self.m = read_boss_header(path, stats)
        w, wm, la, end = boss.section_offsets(self.m)
        nb = (self.m + 7) // 8
        self.W = ByteReader(path, w, self.m, bufsize, stats, budget)
        self.wm = BitReader(path, wm, nb, bufsize, stats, budget)
        self.last = None if wminus_only else BitReader(path, la, nb, bufsize, stats, budget)
        self.pos = 0

    def next(self) -> tuple[int, int, int]:
        if self.pos >= self.m:
            raise GraphCountMismatchError("graph/count mismatch: cursor ran past the end of an input")
        self.pos += 1
        return self.W.read_byte(), self.wm.read_bit(), self.last.read_bit()

    def next_flagged(self) -> tuple[int, int]:
        self.pos += 1
        return self.W.read_byte(), self.wm.read_bit()

    def close(self) -> None:
        self.W.close()
        self.wm.close()
        if self.last is not None:
            self.last.close()


class ColorRowReader:
    def __init__(self, path, bufsize: int, stats: IOStats, budget: BufferBudget):
        f = TrackedFile(path, "rb", stats)
        raw = f.read(COLORS_HEADER.size)
        f.close()
        if raw[:6] != COLORS_MAGIC:
            raise BadMagicError("bad magic: not a .colors file")
        if len(raw) < COLORS_HEADER.size:
            raise TruncatedError("truncated .colors header")
        _, self.rows, self.colors = COLORS_HEADER.unpack(raw)
        self.rb = row_bytes(self.colors)
        self._r = ByteReader(path, COLORS_HEADER.size, self.rows * self.rb, bufsize, stats, budget)

    def next(self) -> int:
        return int.from_bytes(self._r.read(self.rb), "little")

    def close(self) -> None:
        self._r.close()


# -- work file -----------------------------------------------------------------


@dataclass
class PartitionLayout:
    """Fixed placement of the ``sigma + 1`` partitions of the work file.

    ``offsets[c]`` is the first position of partition ``c`` (``offsets[0] ==
    0`` holds the two ``$^k`` nodes), ``lengths[c]`` its size.
    """

    offsets: list[int]
    lengths: list[int]
    compact: bool
    byte_offsets: list[int] = field(default_factory=list)
    byte_lengths: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        pos = 0
        self.byte_offsets = []
        self.byte_lengths = []
        for size in self.lengths:
            nbytes = (size + 1) // 2 if self.compact else 5 * size
            self.byte_offsets.append(pos)
            self.byte_lengths.append(nbytes)
            pos += nbytes
        self.total_bytes = pos

    @property
    def n(self) -> int:
        return sum(self.lengths)


class PartitionCursor:
    """Rewrites the entries of one partition in order, in place."""

    def __init__(self, path, layout: PartitionLayout, c: int, bufsize: int, stats: IOStats, budget: BufferBudget):
        self.layout = layout
        self.size = layout.lengths[c]
        self.compact = layout.compact
        self.base = layout.byte_offsets[c]
        self.nbytes = layout.byte_lengths[c]
        self.path = path
        self.stats = stats
        self.budget = budget
        # a chunk always holds whole entries
        self.chunk_bytes = max(1, bufsize) if self.compact else max(5, bufsize - bufsize % 5)
        self.j = 0
        self._rd = self._wr = None
        self._chunk = None
        self._chunk_start = 0  # entry index of chunk[0]
        self._chunk_entries = 0

    def _open(self) -> None:
        self._rd = TrackedFile(self.path, "rb", self.stats, self.base)
        self._wr = TrackedFile(self.path, "r+b", self.stats, self.base)
        self.budget.take(self.chunk_bytes)

    def _load(self) -> None:
        if self._rd is None:
            self._open()
        done = self._rd.pos - self.base
        n = min(self.chunk_bytes, self.nbytes - done)
        self._chunk = bytearray(self._rd.read(n))
        if len(self._chunk) != n:
            raise TruncatedError("truncated work file")
        self._chunk_start = self.j
        self._chunk_entries = 2 * n if self.compact else n // 5

    def _store(self) -> None:
        self._wr.write(self._chunk)
        self._chunk = None

    def put(self, b: int, mark: bool, h: int, code_h: int, code_hm1: int) -> None:
        if self.j >= self.size:
            raise GraphCountMismatchError("graph/count mismatch: symbol subarray overflow")
        if self._chunk is None:
            self._load()
        e = self.j - self._chunk_start
        ch = self._chunk
        if self.compact:
            byte = e >> 1
            sh = 4 * (e & 1)
            v = (ch[byte] >> sh) & 0xF
            code = v & 3
            if code == code_hm1:
                code = 3
            elif mark and code == 0:
                code = code_h
            zbit = 4 << (h & 1)
            v = (v & ~(zbit | 3)) | (zbit if b else 0) | code
            ch[byte] = (ch[byte] & (0xF0 >> sh)) | (v << sh)
        else:
            o = 5 * e
            zbit = 1 << (h & 1)
            ch[o] = (ch[o] & ~zbit) | (zbit if b else 0)
            if mark and ch[o + 1] == 0 and ch[o + 2] == 0 and ch[o + 3] == 0 and ch[o + 4] == 0:
                ch[o + 1 : o + 5] = h.to_bytes(4, "little")
        self.j += 1
        if self.j - self._chunk_start >= self._chunk_entries or self.j == self.size:
            self._store()

    def close(self) -> None:
        if self.j != self.size:
            raise GraphCountMismatchError("graph/count mismatch: symbol subarray not filled")
        if self._rd is not None:
            self._rd.close()
            self._wr.close()
            self.budget.give(self.chunk_bytes)


class WorkScanner:
    """Front-to-back reader of the work file: yields ``(z, boundary)``."""

    def __init__(self, path, layout: PartitionLayout, zshift: int, bufsize: int, stats: IOStats, budget: BufferBudget):
        self.layout = layout
        self.zshift = zshift
        self._r = ByteReader(path, 0, layout.total_bytes, bufsize, stats, budget)
        self._part = 0
        self._j = 0
        self._byte = 0

    def next(self) -> tuple[int, int]:
        lengths = self.layout.lengths
        while self._j >= lengths[self._part]:
            self._part += 1
            self._j = 0
        j = self._j
        self._j += 1
        if self.layout.compact:
            if j & 1 == 0:
                self._byte = self._r.read_byte()
                v = self._byte & 0xF
            else:
                v = self._byte >> 4
            return (v >> self.zshift) & 1, v & 3
        rec = self._r.read(5)
        return (rec[0] >> self.zshift) & 1, int.from_bytes(rec[1:], "little")

    def close(self) -> None:
        self._r.close()


def _zshift(h: int, compact: bool) -> int:
    return (2 if compact else 0) + (h & 1)


# -- the merge -------------------------------------------------------------------


@dataclass
class StreamStats:
    bytes_read: int = 0
    bytes_written: int = 0
    backward_seeks: int = 0
    peak_buffer_bytes: int = 0
    peak_buffers: int = 0
    iterations: int = 0
    steps: int = 0
    edge_reads: int = 0
    pass_io: list[int] = field(default_factory=list)
    ram_words: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _count_pass(path, sigma: int, bufsize: int, stats: IOStats, budget: BufferBudget) -> list[int]:
    counts = [0] * (sigma + 1)
    g = GraphReader(path, bufsize, stats, budget, wminus_only=True)
    try:
        for _ in range(g.m):
            c, wm = g.next_flagged()
            if wm:
                counts[c] += 1
    finally:
        g.close()
    return counts


def _init_work(path, layout: PartitionLayout, l0: list[int], l1: list[int], bufsize, stats, budget) -> None:
    """Write ``Z^1`` and the initial boundaries sequentially."""
    compact = layout.compact
    zbit = 1 << _zshift(1, compact)
    first = 3 - b2_code_for(2) if compact else 1  # B=1 read in pass 2
    w = ByteWriter(path, bufsize, stats, budget)

    def entries():
        yield 0, first
        yield zbit, 0
        yield None, None
        for c in range(1, len(layout.lengths)):
            for t in range(l0[c] + l1[c]):
                yield (zbit if t >= l0[c] else 0), (first if t == 0 else 0)
            yield None, None

    pending = None
    for z, bval in entries():
        if z is None:
            if pending is not None:
                w.write_byte(pending)
                pending = None
            continue
        if compact:
            v = z | bval
            if pending is None:
                pending = v
            else:
                w.write_byte(pending | (v << 4))
                pending = None
        else:
            w.write(bytes([z]) + bval.to_bytes(4, "little"))
    w.close()


def _prefix_update(path, layout: PartitionLayout, h: int, stats: IOStats) -> None:
    """Write Z bits of the two ``$^k`` entries and demote entry 0's mark."""
    compact = layout.compact
    n = layout.byte_lengths[0]
    rd = TrackedFile(path, "rb", stats)
    buf = bytearray(rd.read(n))
    rd.close()
    if compact:
        zbit = 4 << (h & 1)
        code_hm1 = 3 - b2_code_for(h)
        lo, hi = buf[0] & 0xF, buf[0] >> 4
        lo &= ~zbit
        hi |= zbit
        if (lo & 3) == code_hm1:
            lo = (lo & ~3) | 3
        if (hi & 3) == code_hm1:
            hi = (hi & ~3) | 3
        buf[0] = lo | (hi << 4)
    else:
        zbit = 1 << (h & 1)
        buf[0] &= ~zbit
        buf[5] |= zbit
    wr = TrackedFile(path, "r+b", stats)
    wr.write(buf)
    wr.close()


def _merge_pass(work, paths, layout: PartitionLayout, h: int, bufsize, stats, budget, st: StreamStats) -> None:
    compact = layout.compact
    sigma = len(layout.lengths) - 1
    code_h = b2_code_for(h)
    code_hm1 = 3 - code_h
    _prefix_update(work, layout, h, stats)
    g = [GraphReader(p, bufsize, stats, budget) for p in paths]
    scan = WorkScanner(work, layout, _zshift(h - 1, compact), bufsize, stats, budget)
    cursors = [None] + [PartitionCursor(work, layout, c, bufsize, stats, budget) for c in range(1, sigma + 1)]
    block_id = [-1] * (sigma + 1)
    block = -1
    steps = reads = 0
    try:
        for p in range(layout.n):
            zb, bv = scan.next()
            if bv != 0 and bv != (code_h if compact else h):
                block = p
            steps += 1
            gr = g[zb]
            while True:
                c, wm, last = gr.next()
                reads += 1
                if wm:
                    mark = block_id[c] != block
                    if mark:
                        block_id[c] = block
                    cursors[c].put(zb, mark, h, code_h, code_hm1)
                if last:
                    break
        for gr in g:
            if gr.pos != gr.m:
                raise GraphCountMismatchError("graph/count mismatch: input not fully consumed")
        for cur in cursors[1:]:
            cur.close()
    finally:
        scan.close()
        for gr in g:
            gr.close()
    st.steps += steps
    st.edge_reads += reads


def _emit_pass(work, paths, layout: PartitionLayout, k: int, out_path, bufsize, stats, budget, tmpdir,
               color_paths=None, colors_out=None, lcs_out=None) -> tuple[int, int]:
    compact = layout.compact
    sigma = len(layout.lengths) - 1
    g = [GraphReader(p, bufsize, stats, budget) for p in paths]
    scan = WorkScanner(work, layout, _zshift(k, compact), bufsize, stats, budget)
    tmp = Path(tmpdir)
    wW = ByteWriter(tmp / "W.tmp", bufsize, stats, budget)
    wWm = BitWriter(tmp / "Wm.tmp", bufsize, stats, budget)
    wLast = BitWriter(tmp / "last.tmp", bufsize, stats, budget)
    crs = wC = None
    c0 = rb01 = 0
    if color_paths is not None:
        crs = [ColorRowReader(p, bufsize, stats, budget) for p in color_paths]
        c0 = crs[0].colors
        rb01 = row_bytes(c0 + crs[1].colors)
        wC = ByteWriter(tmp / "colors.tmp", bufsize, stats, budget)
    wL = ByteWriter(tmp / "lcs.tmp", bufsize, stats, budget) if lcs_out is not None else None

    seen = [-1] * (sigma + 1)
    epoch = 0
    nodes = 0
    pending: list[list[tuple[int, int]] | None] = [None, None]

    def flush() -> None:
        a = pending[0] or []
        b = pending[1] or []
        labels: dict[int, int] = {}
        for lab, row in a:
            if lab:
                labels[lab] = row
        for lab, row in b:
            if lab:
                labels[lab] = labels.get(lab, 0) | (row << c0)
        out = sorted(labels)
        if not out:
            wW.write_byte(0)
            wWm.write_bit(0)
            wLast.write_bit(1)
            if wC is not None:
                wC.write(bytes(rb01))
            return
        for t, c in enumerate(out):
            wW.write_byte(c)
            if seen[c] != epoch:
                seen[c] = epoch
                wWm.write_bit(1)
            else:
                wWm.write_bit(0)
            wLast.write_bit(1 if t == len(out) - 1 else 0)
            if wC is not None:
                wC.write(labels[c].to_bytes(rb01, "little"))

    try:
        for q in range(layout.n):
            zb, bv = scan.next()
            if compact:
                cls = "merge" if bv == 0 else ("small" if bv == 3 else "k")
            else:
                cls = "merge" if bv == 0 else ("k" if bv == k else "small")
            if cls != "merge":
                if pending[0] is not None or pending[1] is not None:
                    flush()
                    nodes += 1
                    pending = [None, None]
                if cls == "small":
                    epoch += 1
                if wL is not None:
                    wL.write((bv - 1).to_bytes(4, "little"))
            if pending[zb] is not None:
                raise GraphCountMismatchError("graph/count mismatch: inconsistent merge plan")
            group = []
            gr = g[zb]
            while True:
                c, _, last = gr.next()
                row = crs[zb].next() if crs is not None else 0
                group.append((c, row))
                if last:
                    break
            pending[zb] = group
        if pending[0] is not None or pending[1] is not None:
            flush()
            nodes += 1
        for gr in g:
            if gr.pos != gr.m:
                raise GraphCountMismatchError("graph/count mismatch: input not fully consumed")
    finally:
        scan.close()
        for gr in g:
            gr.close()
        if crs is not None:
            for cr in crs:
                cr.close()
        for w in (wW, wWm, wLast, wC, wL):
            if w is not None:
                w.close()
    m = wW.count

    # assemble the output files from the temporaries
    out = ByteWriter(out_path, bufsize, stats, budget)
    out.write(boss.HEADER.pack(boss.MAGIC, boss.VERSION, g[0].sigma, k, m))
    nb = (m + 7) // 8
    for name, size in (("W.tmp", m), ("Wm.tmp", nb), ("last.tmp", nb)):
        _copy(tmp / name, size, out, bufsize, stats, budget)
    out.close()
    if wC is not None:
        cw = ByteWriter(colors_out, bufsize, stats, budget)
        cw.write(COLORS_HEADER.pack(COLORS_MAGIC, m, c0 + crs[1].colors))
        _copy(tmp / "colors.tmp", m * rb01, cw, bufsize, stats, budget)
        cw.close()
    if wL is not None:
        lw = ByteWriter(lcs_out, bufsize, stats, budget)
        lw.write(LCS_HEADER.pack(LCS_MAGIC, nodes))
        _copy(tmp / "lcs.tmp", 4 * nodes, lw, bufsize, stats, budget)
        lw.close()
    return m, nodes


def _copy(src, size: int, dst: ByteWriter, bufsize, stats, budget) -> None:
    r = ByteReader(src, 0, size, bufsize, stats, budget)
    try:
        left = size
        while left:
            take = min(bufsize, left)
            dst.write(r.read(take))
            left -= take
    finally:
        r.close()


def stream_merge(
    path0,
    path1,
    out_path,
    mode: Mode | str = Mode.COMPACT,
    buffer_bytes: int = DEFAULT_BUFFER,
    *,
    colors: tuple | None = None,
    colors_out=None,
    lcs_out=None,
    workdir=None,
) -> StreamStats:
    """Merge two ``.boss`` files through sequential file streams.

    ``colors`` is a pair of ``.colors`` paths for the inputs; the merged
    matrix goes to ``colors_out``.  ``lcs_out`` requires the full mode.
    The output is byte-identical to the in-memory merge.
    """
    mode = Mode(mode) if isinstance(mode, str) else mode
    if buffer_bytes < 1:
        raise ValueError("buffer_bytes must be positive")
    if lcs_out is not None and mode is not Mode.FULL_B:
        raise ValueError("LCS requires full boundary array")
    if (colors is None) != (colors_out is None):
        raise ValueError("colors and colors_out go together")
    stats = IOStats()
    budget = BufferBudget()
    st = StreamStats()
    s0, k0, m0 = read_boss_header(path0, stats)
    s1, k1, m1 = read_boss_header(path1, stats)
    if (s0, k0) != (s1, k1):
        raise IncompatibleGraphsError(f"incompatible graphs: k={k0}/{k1}, sigma={s0}/{s1}")
    sigma, k = s0, k0
    compact = mode is Mode.COMPACT
    paths = (path0, path1)

    with tempfile.TemporaryDirectory(dir=workdir, prefix="bossmerge-") as tmpdir:
        work = Path(tmpdir) / "work.bin"
        before = stats.total()
        l0 = _count_pass(path0, sigma, buffer_bytes, stats, budget)
        l1 = _count_pass(path1, sigma, buffer_bytes, stats, budget)
        lengths = [2] + [l0[c] + l1[c] for c in range(1, sigma + 1)]
        offsets = [0]
        for size in lengths[:-1]:
            offsets.append(offsets[-1] + size)
        layout = PartitionLayout(offsets, lengths, compact)
        # count arrays are dropped here; only start/block_id/cursor positions remain
        st.ram_words = 3 * (sigma + 1)
        _init_work(work, layout, l0, l1, buffer_bytes, stats, budget)
        st.pass_io.append(stats.total() - before)
        for h in range(2, k + 1):
            before = stats.total()
            _merge_pass(work, paths, layout, h, buffer_bytes, stats, budget, st)
            st.pass_io.append(stats.total() - before)
            st.iterations += 1
        before = stats.total()
        _emit_pass(work, paths, layout, k, out_path, buffer_bytes, stats, budget, tmpdir,
                   colors, colors_out, lcs_out)
        st.pass_io.append(stats.total() - before)

    st.bytes_read = stats.bytes_read
    st.bytes_written = stats.bytes_written
    st.backward_seeks = stats.backward_seeks
    st.peak_buffer_bytes = budget.peak
    st.peak_buffers = budget.peak_buffers
    logger.info("stream merge %s + %s -> %s: %s", path0, path1, out_path, st.to_json())
    return st


def workdir_default() -> str | None:
    return os.environ.get("BOSS_WORKDIR") or None


def copy_file(src, dst) -> None:
    shutil.copyfile(src, dst)

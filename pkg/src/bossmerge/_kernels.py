"""Inner loops of the merge, compiled with numba when it is available.

Set ``BOSSMERGE_NO_JIT=1`` to run them as plain Python (slow, but handy
under a debugger).  Bit arrays are packed LSB-first: bit ``q`` of a 1-bit
array lives in byte ``q >> 3``, entry ``q`` of a 2-bit array in byte
``q >> 2`` at shift ``2 * (q & 3)``.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("BOSSMERGE_NO_JIT"):
    JIT = False
else:
    try:
        from numba import njit as _njit

        JIT = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        JIT = False


def _jit(fn):
    if JIT:
        return _njit(cache=True, nogil=True)(fn)
    return fn


# error codes returned by the kernels
OK = 0
OVERRUN = 1
UNCONSUMED = 2
PARTITION_OVERFLOW = 3
BAD_MERGE = 4

# final boundary classes
MERGE = 0
LCP_KMINUS1 = 1
SMALL = 2


@_jit
def get_bit(arr, q):
    return (arr[q >> 3] >> (q & 7)) & 1


@_jit
def put_bit(arr, q, b):
    if b:
        arr[q >> 3] |= np.uint8(1 << (q & 7))
    else:
        arr[q >> 3] &= np.uint8(~(1 << (q & 7)) & 0xFF)


@_jit
def get2(arr, q):
    return (arr[q >> 2] >> (2 * (q & 3))) & 3


@_jit
def put2(arr, q, v):
    s = 2 * (q & 3)
    arr[q >> 2] = np.uint8((arr[q >> 2] & (~(3 << s) & 0xFF)) | (v << s))


@_jit
def count_flagged(W, wminus, counts):
    """Add, per symbol, the number of Wminus-flagged positions into ``counts``."""
    for i in range(W.shape[0]):
        if wminus[i]:
            counts[W[i]] += 1


@_jit
def merge_pass(h, W0, wm0, last0, W1, wm1, last1, zprev, zcur, b2, bfull, full,
               F, start, block_id, n, counters):
    """One iteration computing Z^h from Z^(h-1) and updating the boundaries.

    ``F``, ``start`` and ``block_id`` are indexed by symbol (entry 0 unused).
    ``counters`` accumulates main-loop steps and edge reads.
    """
    sigma = F.shape[0] - 1
    for c in range(1, sigma + 1):
        F[c] = start[c]
        block_id[c] = -1
    put_bit(zcur, 0, 0)
    put_bit(zcur, 1, 1)
    code_h = 2 if h % 2 == 0 else 1
    code_hm1 = 3 - code_h
    i0 = 0
    i1 = 0
    m0 = W0.shape[0]
    m1 = W1.shape[0]
    block = -1
    steps = 0
    reads = 0
    for p in range(n):
        if full:
            v = bfull[p]
            if v != 0 and v != h:
                block = p
        else:
            code = get2(b2, p)
            if code != 0 and code != code_h:
                block = p
                if code == code_hm1:
                    put2(b2, p, 3)
        b = get_bit(zprev, p)
        steps += 1
        if b == 0:
            W, wm, last, i, m = W0, wm0, last0, i0, m0
        else:
            W, wm, last, i, m = W1, wm1, last1, i1, m1
        while True:
            if i >= m:
                counters[0] += steps
                counters[1] += reads
                return OVERRUN
            reads += 1
            if wm[i]:
                c = W[i]
                q = F[c]
                F[c] = q + 1
                if q >= n:
                    return PARTITION_OVERFLOW
                put_bit(zcur, q, b)
                if block_id[c] != block:
                    block_id[c] = block
                    if full:
                        if bfull[q] == 0:
                            bfull[q] = h
                    elif get2(b2, q) == 0:
                        put2(b2, q, code_h)
            stop = last[i]
            i += 1
            if stop:
                break
        if b == 0:
            i0 = i
        else:
            i1 = i
    counters[0] += steps
    counters[1] += reads
    if i0 != m0 or i1 != m1:
        return UNCONSUMED
    for c in range(1, sigma + 1):
        end = start[c + 1] if c < sigma else n
        if F[c] != end:
            return PARTITION_OVERFLOW
    return OK


@_jit
def final_class(b2, bfull, full, k, q):
    if full:
        v = bfull[q]
        if v == 0:
            return MERGE
        if v == k:
            return LCP_KMINUS1
        return SMALL
    code = get2(b2, q)
    if code == 0:
        return MERGE
    if code == 3:
        return SMALL
    return LCP_KMINUS1


@_jit
def emit_pass(k, W0, wm0, last0, W1, wm1, last1, zk, b2, bfull, full, n,
              seen, outW, outWm, outLast, src0, src1, lcs, want_lcs, counts):
    """Write the union graph; returns an error code.

    ``seen[c]`` holds the epoch of the last flagged ``c``; the epoch advances
    at every position whose boundary class is SMALL.  ``src0``/``src1`` get,
    per output position, the contributing input position or -1.
    ``counts`` receives (positions written, nodes written).
    """
    for c in range(seen.shape[0]):
        seen[c] = -1
    epoch = 0
    i0 = 0
    i1 = 0
    m0 = W0.shape[0]
    m1 = W1.shape[0]
    out = 0
    nodes = 0
    # pending node: up to one group from each graph
    has0 = False
    has1 = False
    s0 = e0 = s1 = e1 = 0
    for q in range(n + 1):
        cls = MERGE
        if q < n:
            cls = final_class(b2, bfull, full, k, q)
        if q == n or cls != MERGE:
            if has0 or has1:
                # flush the pending node: sorted union of both label runs
                a = s0
                bb = s1
                real = 0
                while (has0 and a < e0) or (has1 and bb < e1):
                    ca = W0[a] if (has0 and a < e0) else 256
                    cb = W1[bb] if (has1 and bb < e1) else 256
                    if ca == 0:
                        a += 1
                        continue
                    if cb == 0:
                        bb += 1
                        continue
                    c = min(ca, cb)
                    outW[out] = c
                    src0[out] = -1
                    src1[out] = -1
                    if ca == c:
                        src0[out] = a
                        a += 1
                    if cb == c:
                        src1[out] = bb
                        bb += 1
                    if seen[c] != epoch:
                        seen[c] = epoch
                        outWm[out] = 1
                    else:
                        outWm[out] = 0
                    outLast[out] = 0
                    out += 1
                    real += 1
                if real == 0:
                    outW[out] = 0
                    outWm[out] = 0
                    src0[out] = -1
                    src1[out] = -1
                    out += 1
                outLast[out - 1] = 1
                nodes += 1
                has0 = False
                has1 = False
            if q == n:
                break
            if cls == SMALL:
                epoch += 1
            if want_lcs:
                lcs[nodes] = bfull[q] - 1
        b = get_bit(zk, q)
        if b == 0:
            if has0:
                return BAD_MERGE
            s0 = i0
            while True:
                if i0 >= m0:
                    return OVERRUN
                stop = last0[i0]
                i0 += 1
                if stop:
                    break
            e0 = i0
            has0 = True
        else:
            if has1:
                return BAD_MERGE
            s1 = i1
            while True:
                if i1 >= m1:
                    return OVERRUN
                stop = last1[i1]
                i1 += 1
                if stop:
                    break
            e1 = i1
            has1 = True
    counts[0] = out
    counts[1] = nodes
    if i0 != m0 or i1 != m1:
        return UNCONSUMED
    return OK

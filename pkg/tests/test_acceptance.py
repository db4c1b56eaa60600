"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the per-criterion
lines are printed in the terminal summary (and to stdout with ``-s``).
"""

from __future__ import annotations

import random
import time
from pathlib import Path

import numpy as np
import pytest

from bossmerge import boss, formats
from bossmerge.alphabet import DNA
from bossmerge.boss import to_bytes, validate
from bossmerge.cli import main
from bossmerge.merge import Mode, emit_lcs, emit_union, merge_colored, run_merge
from bossmerge.pipeline import build_pipeline
from bossmerge.reference import StringCollection, build_boss, build_colored, build_lcs
from bossmerge.streams import stream_merge

from conftest import ACCEPTANCE_LINES, SAMPLE
from oracles import common_prefix, merged_labels, naive_graph, random_collection, tagged_order

ORDERS = (1, 2, 3, 4, 5, 8)
GOLDEN = Path(__file__).parent / "golden" / "sample_dump.txt"


class Criterion:
    """Collects failures for one criterion and reports a single line."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.failures: list[str] = []
        self.facts: list[str] = []

    def check(self, ok: bool, what: str) -> None:
        if not ok and len(self.failures) < 5:
            self.failures.append(what)

    def note(self, fact: str) -> None:
        self.facts.append(fact)

    def finish(self) -> None:
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.facts + self.failures)
        line = f"criterion {self.number}: {status} {self.title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not self.failures, line


def collection_pair(rng: random.Random, max_strings: int = 50, max_len: int = 200):
    """Two random collections; part of the second is cut from the first so k-mers overlap."""
    a = random_collection(rng, max_strings, max_len)
    b = random_collection(rng, max_strings, max_len)
    for j in range(len(b)):
        if rng.random() < 0.4:
            s = rng.choice(a)
            i = rng.randrange(len(s))
            b[j] = s[i : i + rng.randint(1, len(s))]
    return a, b


def dna(strings) -> StringCollection:
    return StringCollection.of(strings)


def small_pairs(seed: int, count: int, max_nodes: int = 1000):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, b = collection_pair(rng, 12, 40)
        k = ORDERS[len(out) % len(ORDERS)]
        g0, g1 = build_boss(dna(a), k), build_boss(dna(b), k)
        if g0.n + g1.n <= max_nodes:
            out.append((a, b, k, g0, g1))
    return out


def test_criterion_01_oracle_equivalence():
    c = Criterion(1, "merge equals joint build, byte for byte")
    rng = random.Random(2024)
    pairs = 500
    for t in range(pairs):
        a, b = collection_pair(rng)
        k = ORDERS[t % len(ORDERS)]
        g0, g1 = build_boss(dna(a), k), build_boss(dna(b), k)
        got = to_bytes(emit_union(g0, g1, run_merge(g0, g1)))
        c.check(got == to_bytes(build_boss(dna(a + b), k)), f"pair {t} (k={k})")
    c.note(f"{pairs} pairs, k in {ORDERS}")
    c.finish()


def test_criterion_02_prefix_order():
    c = Criterion(2, "Z^h equals the tagged length-h prefix sort at every pass")
    checked = 0
    for a, b, k, g0, g1 in small_pairs(7, 200):
        n0, n1 = naive_graph(a, k).nodes, naive_graph(b, k).nodes

        def check(state):
            nonlocal checked
            checked += 1
            c.check(list(state.z()) == tagged_order(n0, n1, state.h), f"k={k} h={state.h}")

        for mode in Mode:
            run_merge(g0, g1, mode, on_iteration=check)
    c.note(f"200 merges, {checked} passes compared")
    c.finish()


def test_criterion_03_lcp_boundaries():
    c = Criterion(3, "full B minus one is the LCP of adjacent reversed labels")
    positions = 0
    for a, b, k, g0, g1 in small_pairs(11, 200):
        labels = merged_labels(naive_graph(a, k).nodes, naive_graph(b, k).nodes)
        B = run_merge(g0, g1, Mode.FULL_B).bfull
        c.check(len(B) == len(labels) and B[0] == 1, f"k={k} size/first entry")
        for q in range(1, len(labels)):
            positions += 1
            if labels[q] == labels[q - 1]:
                c.check(B[q] == 0, f"k={k} q={q} equal labels need B=0")
            else:
                lcp = common_prefix(labels[q - 1][::-1], labels[q][::-1])
                c.check(B[q] == lcp + 1, f"k={k} q={q} B={B[q]} lcp={lcp}")
    c.note(f"200 merges, {positions} positions")
    c.finish()


def test_criterion_04_working_space():
    c = Criterion(4, "compact mode uses 4(n0+n1) bits plus at most 3 sigma + 16 words")
    rng = random.Random(4)
    worst = 0
    for t in range(200):
        sigma = (1, 2, 4, 8, 20)[t % 5]
        letters = "ABCDEFGHIJKLMNOPQRST"[:sigma]
        k = ORDERS[t % len(ORDERS)]
        cols = [random_collection(rng, 20, 60, letters) for _ in range(2)]
        enc = [StringCollection(tuple(bytes(letters.index(ch) + 1 for ch in s) for s in S)) for S in cols]
        g0, g1 = build_boss(enc[0], k, sigma), build_boss(enc[1], k, sigma)
        st = run_merge(g0, g1).stats
        c.check(st.aux_bits == 4 * (g0.n + g1.n), f"sigma={sigma} bits={st.aux_bits}")
        c.check(st.aux_words <= 3 * sigma + 16, f"sigma={sigma} words={st.aux_words}")
        worst = max(worst, st.aux_words - 3 * sigma)
    c.note(f"200 merges, sigma in 1..20, words at most 3 sigma + {worst}")
    c.finish()


def test_criterion_05_time_scaling():
    c = Criterion(5, "step and edge-read counters are exact; large merge timing")
    for a, b, k, g0, g1 in small_pairs(5, 200):
        st = run_merge(g0, g1).stats
        c.check(st.steps == (k - 1) * (g0.n + g1.n), f"k={k} steps={st.steps}")
        c.check(st.edge_reads == (k - 1) * (g0.m + g1.m), f"k={k} edge reads={st.edge_reads}")
    rng = random.Random(32)
    big = [
        StringCollection(tuple(bytes(rng.randint(1, 4) for _ in range(200)) for _ in range(2500)))
        for _ in range(2)
    ]
    g0, g1 = build_boss(big[0], 32), build_boss(big[1], 32)
    run_merge(build_boss(dna(["ACGT"]), 32), build_boss(dna(["TGCA"]), 32))  # compile outside the clock
    t0 = time.perf_counter()
    plan = run_merge(g0, g1)
    emit_union(g0, g1, plan)
    elapsed = time.perf_counter() - t0
    c.check(plan.stats.steps == 31 * (g0.n + g1.n), "large merge step count")
    c.check(elapsed < 60.0, f"large merge took {elapsed:.1f} s")
    c.note(f"200 exact counter checks; m0+m1={g0.m + g1.m}, k=32 merged in {elapsed:.2f} s")
    c.finish()


def test_criterion_06_colored():
    c = Criterion(6, "colored merge equals colored joint build")
    rng = random.Random(6)
    pairs = 120
    for t in range(pairs):
        k = ORDERS[t % len(ORDERS)]
        left = [random_collection(rng, 10, 60) for _ in range(rng.randint(1, 3))]
        right = [random_collection(rng, 10, 60) for _ in range(rng.randint(1, 3))]
        if rng.random() < 0.5:
            right[0] = right[0] + left[0][:3]
        g0, M0 = build_colored([dna(S) for S in left], k)
        g1, M1 = build_colored([dna(S) for S in right], k)
        g, M = merge_colored(g0, M0, g1, M1, run_merge(g0, g1))
        eg, eM = build_colored([dna(S) for S in left + right], k)
        c.check(g == eg and M == eM, f"pair {t} (k={k}, colors {len(left)}+{len(right)})")
    c.note(f"{pairs} pairs")
    c.finish()


def test_criterion_07_lcs():
    c = Criterion(7, "LCS of the merge equals LCS of the joint build; 2(n0+n1) working bits")
    rng = random.Random(77)
    pairs = 120
    for t in range(pairs):
        a, b = collection_pair(rng, 20, 80)
        k = ORDERS[t % len(ORDERS)]
        g0, g1 = build_boss(dna(a), k), build_boss(dna(b), k)
        plan = run_merge(g0, g1, Mode.FULL_B)
        c.check(np.array_equal(emit_lcs(g0, g1, plan), build_lcs(dna(a + b), k)), f"pair {t} (k={k})")
        c.check(plan.stats.aux_bits == 2 * (g0.n + g1.n), f"pair {t} bits={plan.stats.aux_bits}")
    c.note(f"{pairs} pairs")
    c.finish()


def test_criterion_08_external_memory(tmp_path):
    c = Criterion(8, "streamed merge equals in-memory merge with forward-only I/O")
    rng = random.Random(8)
    runs = 0
    for t in range(60):
        a, b = collection_pair(rng, 20, 80)
        k = ORDERS[t % len(ORDERS)]
        mode = Mode.FULL_B if t % 3 == 0 else Mode.COMPACT
        colored = t % 2 == 0
        buffer_bytes = (1, 7, 64, 4096)[t % 4]
        g0, M0 = build_colored([dna(a)], k)
        g1, M1 = build_colored([dna(b)], k)
        p0, p1, out = tmp_path / "a.boss", tmp_path / "b.boss", tmp_path / "out.boss"
        boss.save(g0, p0)
        boss.save(g1, p1)
        kw = {}
        if colored:
            formats.save_colors(M0, tmp_path / "a.colors")
            formats.save_colors(M1, tmp_path / "b.colors")
            kw = dict(colors=(tmp_path / "a.colors", tmp_path / "b.colors"), colors_out=tmp_path / "out.colors")
        if mode is Mode.FULL_B:
            kw["lcs_out"] = tmp_path / "out.lcs"
        st = stream_merge(p0, p1, out, mode, buffer_bytes, **kw)
        plan = run_merge(g0, g1, mode)
        c.check(out.read_bytes() == to_bytes(emit_union(g0, g1, plan)), f"run {t} graph bytes")
        if colored:
            _, M = merge_colored(g0, M0, g1, M1, plan)
            c.check(formats.load_colors(tmp_path / "out.colors") == M, f"run {t} colors")
        if mode is Mode.FULL_B:
            c.check(np.array_equal(formats.load_lcs(tmp_path / "out.lcs"), emit_lcs(g0, g1, plan)), f"run {t} lcs")
        c.check(st.backward_seeks == 0, f"run {t} backward seeks={st.backward_seeks}")
        passes = st.pass_io[1:-1]
        c.check(len(passes) == k - 1 and len(set(passes)) <= 1, f"run {t} per-pass I/O {passes}")
        runs += 1
    c.note(f"{runs} streamed merges, buffers 1..4096 bytes")
    c.finish()


def test_criterion_09_pipeline(tmp_path):
    c = Criterion(9, "pipeline over 8 leaves equals direct build in 3 rounds")
    rng = random.Random(9)
    strings = ["".join(rng.choice("ACGT") for _ in range(40)) for _ in range(8)]
    inp = tmp_path / "all.txt"
    inp.write_text("\n".join(strings) + "\n")
    for k in (3, 8):
        res = build_pipeline([inp], k, 8 * 40, tmp_path / f"work{k}", output=tmp_path / f"out{k}.boss")
        c.check(res.leaves == 8, f"k={k} leaves={res.leaves}")
        c.check(res.rounds == 3, f"k={k} rounds={res.rounds}")
        c.check(boss.load(res.graph_path) == build_boss(dna(strings), k), f"k={k} graph differs")
    c.note("8 leaves, k in (3, 8)")
    c.finish()


def test_criterion_10_sample_fixture(tmp_path, capsys):
    c = Criterion(10, "build of the three-string example matches the oracle and golden dump")
    fasta = tmp_path / "sample.fasta"
    fasta.write_text("".join(f">s{i}\n{s}\n" for i, s in enumerate(SAMPLE)))
    out = tmp_path / "sample.boss"
    c.check(main(["build", "--k", "3", str(fasta), "-o", str(out)]) == 0, "build exit code")
    capsys.readouterr()
    g = boss.load(out)
    oracle = naive_graph(SAMPLE, 3)
    labels = [DNA.decode(v) for v in boss.node_labels(g)]
    c.check(set(labels) == set(oracle.nodes), "node set")
    c.check(validate(g) == [], "validate")
    c.check(main(["validate", str(out)]) == 0, "validate exit code")
    capsys.readouterr()
    main(["dump", str(out)])
    dump = capsys.readouterr().out
    c.check(dump == GOLDEN.read_text(), "dump differs from golden file")
    c.note(f"n={g.n}, m={g.m}")
    c.finish()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

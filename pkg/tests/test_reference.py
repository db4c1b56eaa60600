from __future__ import annotations

import random

import pytest

from bossmerge.alphabet import DNA
from bossmerge.boss import validate
from bossmerge.reference import (
    StringCollection,
    build_boss,
    build_colored,
    build_lcs,
    colex_cmp,
    extract_edges,
    sorted_nodes,
)

from conftest import SAMPLE, dna
from oracles import kmers, naive_colors, naive_graph, naive_lcs, random_collection


def decode_set(edges):
    return {DNA.decode(e) for e in edges}


@pytest.mark.parametrize(
    "strings,k,expected",
    [
        (("AC",), 2, {"$$A", "$AC"}),
        (("A",), 1, {"$A"}),
        (("AC", "AG"), 2, {"$$A", "$AC", "$AG"}),
    ],
)
def test_extract_edges(strings, k, expected):
    assert decode_set(extract_edges(dna(*strings), k)) == expected


def test_extract_edges_rejects_bad_k():
    with pytest.raises(ValueError):
        extract_edges(dna("A"), 0)


def test_empty_collection_rejected():
    with pytest.raises(ValueError):
        StringCollection(())
    with pytest.raises(ValueError):
        StringCollection((b"",))


def test_colex_cmp():
    # reverse("AC") = "CA" > "AG" = reverse("GA")
    assert colex_cmp(DNA.encode("AC"), DNA.encode("GA")) == 1
    assert "AC"[::-1] > "GA"[::-1]
    assert colex_cmp(bytes([0, 0]), bytes([0, 1])) == -1  # $$ before $A
    assert colex_cmp(DNA.encode("TT"), DNA.encode("TT")) == 0
    with pytest.raises(ValueError):
        colex_cmp(b"\x01", b"\x01\x02")


def test_build_ac():
    g = build_boss(dna("AC"), 2)
    assert DNA.decode(g.W) == "AC$"
    assert list(g.last) == [1, 1, 1]
    assert list(g.wminus) == [1, 1, 0]


def test_build_ac_ag():
    g = build_boss(dna("AC", "AG"), 2)
    assert DNA.decode(g.W) == "ACG$$"
    assert list(g.last) == [1, 0, 1, 1, 1]
    assert list(g.wminus) == [1, 1, 1, 0, 0]


def test_build_single_symbol():
    g = build_boss(dna("A"), 1)
    assert DNA.decode(g.W) == "A$"
    assert g.n == 2


def test_sample_nodes():
    g = build_boss(dna(*SAMPLE), 3)
    oracle = naive_graph(SAMPLE, 3)
    assert [DNA.decode(v) for v in sorted_nodes(dna(*SAMPLE), 3)] == oracle.nodes
    assert (g.n, g.m) == (oracle.n, oracle.m)
    assert 18 >= g.m >= g.n
    assert validate(g) == []


@pytest.mark.parametrize("seed", range(30))
def test_build_matches_naive(seed):
    rng = random.Random(seed)
    S = random_collection(rng, 8, 30)
    k = rng.randint(1, 6)
    g = build_boss(StringCollection.of(S), k)
    o = naive_graph(S, k)
    assert DNA.decode(g.W) == "".join(o.W)
    assert list(g.wminus) == o.wminus
    assert list(g.last) == o.last
    assert validate(g) == []


def test_build_rejects_large_symbols():
    with pytest.raises(ValueError, match="sigma"):
        build_boss(StringCollection((bytes([5]),)), 1, sigma=4)


def test_colored_ac_ag():
    g, M = build_colored([dna("AC"), dna("AG")], 2)
    assert DNA.decode(g.W) == "ACG$$"
    assert M.row_strings() == ["11", "10", "01", "00", "00"]


def test_colored_single_collection():
    g, M = build_colored([dna(*SAMPLE)], 3)
    assert list(M.bits[:, 0]) == [c != 0 for c in g.W]


def test_colored_identical_collections():
    g, M = build_colored([dna(*SAMPLE), dna(*SAMPLE)], 3)
    real = g.W != 0
    assert M.bits[real].all() and not M.bits[~real].any()


def test_colored_empty_input():
    with pytest.raises(ValueError):
        build_colored([], 2)


@pytest.mark.parametrize("seed", range(15))
def test_colored_matches_naive(seed):
    rng = random.Random(100 + seed)
    cols = [random_collection(rng, 4, 15) for _ in range(rng.randint(1, 4))]
    k = rng.randint(1, 5)
    _, M = build_colored([StringCollection.of(c) for c in cols], k)
    assert M.row_strings() == naive_colors(cols, k)


@pytest.mark.parametrize(
    "strings,k,expected",
    [
        (("AC",), 2, [0, 0, 0]),
        (("AC", "AG"), 2, [0, 0, 0, 0]),
        (("ACG", "TCG"), 2, [0, 0, 0, 1, 0, 0]),  # $$ $A AC TC CG $T
    ],
)
def test_build_lcs(strings, k, expected):
    assert list(build_lcs(dna(*strings), k)) == expected
    assert naive_lcs(strings, k) == expected


@pytest.mark.parametrize("seed", range(15))
def test_lcs_matches_naive(seed):
    rng = random.Random(200 + seed)
    S = random_collection(rng, 6, 25)
    k = rng.randint(1, 7)
    lcs = build_lcs(StringCollection.of(S), k)
    assert list(lcs) == naive_lcs(S, k)
    assert lcs.max(initial=0) < k


def test_kmers_oracle_agrees():
    assert kmers(["AC"], 2) == decode_set(extract_edges(dna("AC"), 2))

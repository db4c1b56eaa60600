from __future__ import annotations

import io

import numpy as np
import pytest

from bossmerge import boss
from bossmerge.alphabet import DNA
from bossmerge.boss import BossGraph, compute_C, lf, node_label, node_labels, validate
from bossmerge.errors import (
    BadMagicError,
    InvalidGraphFileError,
    MalformedGraphError,
    TruncatedError,
    UnsupportedVersionError,
)
from bossmerge.reference import build_boss

from conftest import dna
from oracles import naive_graph


def rules(g):
    return [v.rule for v in validate(g)]


def test_ac_graph_arrays(ac_graph):
    # positions are 0-based here and everywhere in the package
    assert DNA.decode(ac_graph.W) == "AC$"
    assert list(ac_graph.last) == [1, 1, 1]
    assert list(ac_graph.wminus) == [1, 1, 0]
    assert validate(ac_graph) == []


def test_last_must_end_with_one(ac_graph):
    g = BossGraph(2, 4, ac_graph.W, ac_graph.wminus, [1, 1, 0])
    assert "last[m] must be 1" in rules(g)


def test_indegree_count_violation(ac_graph):
    g = BossGraph(2, 4, ac_graph.W, [1, 1, 1], ac_graph.last)
    assert any(r.startswith("in-degree count") for r in rules(g))


def test_placeholder_must_stand_alone():
    g = BossGraph(1, 4, [1, 0], [1, 0], [0, 1])
    assert "placeholder $ must be the only entry of its node group" in rules(g)


def test_group_labels_increase():
    g = BossGraph(1, 4, [2, 1, 0, 0], [1, 1, 0, 0], [0, 1, 1, 1])
    assert "labels within a node group must strictly increase" in rules(g)


def test_deep_check_catches_wrong_flag():
    # node A has two sources, C and G; the flag belongs on the edge out of C
    g = build_boss(dna("CA", "GA"), 1)
    assert validate(g) == []
    a_edges = [i for i in range(g.m) if DNA.decode([g.W[i]]) == "A"]
    assert [int(g.wminus[i]) for i in a_edges] == [1, 0]
    wm = g.wminus.copy()
    wm[a_edges[0]], wm[a_edges[1]] = 0, 1
    assert "Wminus must flag the edge from the smallest source" in rules(BossGraph(1, 4, g.W, wm, g.last))


def test_validate_symbol_out_of_range():
    assert "symbol code exceeds sigma" in rules(BossGraph(1, 2, [3, 0], [1, 0], [1, 1]))


@pytest.mark.parametrize(
    "strings,k,expected",
    [
        (("AC",), 2, [0, 1, 2, 3, 3, 3]),
        (("A",), 1, [0, 1, 2, 2, 2, 2]),
        (("AC", "AG"), 2, [0, 1, 2, 3, 4, 4]),
    ],
)
def test_compute_C(strings, k, expected):
    C = compute_C(build_boss(dna(*strings), k))
    assert list(C) == expected
    assert C[-1] == len(naive_graph(strings, k).nodes)


def test_compute_C_rejects_malformed(ac_graph):
    g = BossGraph(2, 4, ac_graph.W, ac_graph.wminus, [1, 1, 0])
    with pytest.raises(MalformedGraphError, match="malformed graph"):
        compute_C(g)


def test_lf(ac_graph):
    assert lf(ac_graph, 0) == 1  # $$ -A-> $A
    assert lf(ac_graph, 1) == 2  # $A -C-> AC
    with pytest.raises(ValueError, match="not a destination-defining edge"):
        lf(ac_graph, 2)


def test_lf_is_bijection(sample_graph):
    g = sample_graph
    dests = sorted(lf(g, i) for i in np.flatnonzero(g.wminus))
    assert dests == list(range(1, g.n))


def test_node_label(ac_graph):
    assert node_label(ac_graph, 0) == bytes(2)
    assert DNA.decode(node_label(ac_graph, 2)) == "AC"
    with pytest.raises(IndexError):
        node_label(ac_graph, 3)


def test_node_labels_match_oracle(sample_graph):
    oracle = naive_graph(("TACACT", "TACTCG", "GACTCA"), 3).nodes
    assert [DNA.decode(v) for v in node_labels(sample_graph)] == oracle
    assert [DNA.decode(node_label(sample_graph, j)) for j in range(sample_graph.n)] == oracle


def test_roundtrip(sample_graph):
    raw = boss.to_bytes(sample_graph)
    assert raw.startswith(b"BOSS1\0")
    assert boss.from_bytes(raw) == sample_graph


def test_file_roundtrip(tmp_path, sample_graph):
    boss.save(sample_graph, tmp_path / "g.boss")
    assert boss.load(tmp_path / "g.boss") == sample_graph


def test_magic(ac_graph):
    assert boss.to_bytes(ac_graph)[:6] == b"BOSS1\0"
    with pytest.raises(BadMagicError):
        boss.from_bytes(b"NOPE" + boss.to_bytes(ac_graph)[4:])


def test_truncated(ac_graph):
    raw = boss.to_bytes(ac_graph)
    with pytest.raises(TruncatedError, match="truncated"):
        boss.from_bytes(raw[:-1])
    with pytest.raises(TruncatedError):
        boss.from_bytes(raw[:10])


def test_trailing_bytes(ac_graph):
    with pytest.raises(InvalidGraphFileError):
        boss.from_bytes(boss.to_bytes(ac_graph) + b"\0")


def test_version(ac_graph):
    raw = bytearray(boss.to_bytes(ac_graph))
    raw[6] = 9
    with pytest.raises(UnsupportedVersionError):
        boss.from_bytes(bytes(raw))


def test_invariant_violation_on_load(ac_graph):
    raw = bytearray(boss.to_bytes(ac_graph))
    _, _, last_off, _ = boss.section_offsets(ac_graph.m)
    raw[last_off] = 0b011  # last[m] cleared
    with pytest.raises(InvalidGraphFileError):
        boss.from_bytes(bytes(raw))
    assert boss.from_bytes(bytes(raw), check=False).last[-1] == 0


def test_serialize_layout(ac_graph):
    buf = io.BytesIO()
    boss.serialize(ac_graph, buf)
    raw = buf.getvalue()
    assert len(raw) == boss.HEADER.size + 3 + 1 + 1
    assert raw[boss.HEADER.size : boss.HEADER.size + 3] == bytes([1, 2, 0])


def test_graph_is_immutable(ac_graph):
    with pytest.raises(ValueError):
        ac_graph.W[0] = 3


def test_bad_parameters():
    with pytest.raises(ValueError):
        BossGraph(0, 4, [0], [0], [1])
    with pytest.raises(ValueError):
        BossGraph(1, 0, [0], [0], [1])

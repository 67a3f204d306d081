"""Structural behavior of the hierarchy DAG: construction, rewiring,
pruning, validation and serialization."""

import pytest

from hierseq import (
    Alphabet,
    DuplicateStringError,
    DuplicateTargetError,
    HierarchyDag,
    IllegalRewriteError,
    NotATargetError,
    OverlapError,
    SymbolTable,
)

AB = SymbolTable.from_chars("abcd")


def enc(text: str) -> tuple[int, ...]:
    return AB.encode(text)


def build_flat(*targets: str) -> HierarchyDag:
    dag = HierarchyDag(Alphabet(4))
    for t in targets:
        dag.add_flat_target(enc(t))
    return dag


def test_flat_target_costs_its_length():
    dag = build_flat("abab")
    (t,) = dag.targets()
    assert dag.edge_cost() == 4
    assert dag.parse_of(t) == (0, 1, 0, 1)
    assert dag.total_target_length() == 4
    assert dag.validate() == []


def test_duplicate_target_rejected():
    dag = build_flat("abab")
    with pytest.raises(DuplicateTargetError):
        dag.add_flat_target(enc("abab"))


def test_add_intermediate_rewires_both_occurrences():
    dag = build_flat("abab")
    (t,) = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t, 1), (t, 3)])
    assert dag.is_intermediate(v)
    assert dag.parse_of(t) == (v, v)
    assert dag.parse_of(v) == (0, 1)
    assert dag.out_degree(v) == 2
    assert dag.edge_cost() == 4
    assert dag.validate() == []


def test_add_intermediate_needs_two_uses():
    dag = build_flat("abcd")
    (t,) = dag.targets()
    with pytest.raises(ValueError):
        dag.add_intermediate(enc("ab"), [(t, 1)])


def test_overlapping_windows_rejected():
    dag = build_flat("aaa", "baaab")
    t = dag.targets()[0]
    with pytest.raises(OverlapError):
        dag.add_intermediate(enc("aa"), [(t, 1), (t, 2)])


def test_duplicate_intermediate_string_rejected():
    dag = build_flat("abab", "cdabcd")
    t1, t2 = dag.targets()
    dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3)])
    with pytest.raises(DuplicateStringError):
        dag.add_intermediate(enc("ab"), [(t2, 3), (t1, 1)])


def test_window_must_align_to_piece_boundaries():
    dag = build_flat("abab", "cdabcd")
    t1, t2 = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3)])
    # t1 is now tiled as [v, v]; a window cutting into v's span is illegal
    with pytest.raises(ValueError):
        dag.add_intermediate(enc("ba"), [(t1, 2), (t2, 4)])
    assert dag.parse_of(t1) == (v, v)


def test_edges_are_indexed_and_derived():
    dag = build_flat("abab")
    (t,) = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t, 1), (t, 3)])
    assert dag.edges() == [(0, v, 1), (1, v, 2), (v, t, 1), (v, t, 2)]


def test_clone_is_independent():
    dag = build_flat("abab")
    (t,) = dag.targets()
    copy = dag.clone()
    copy.add_intermediate(enc("ab"), [(t, 1), (t, 3)])
    assert dag.edge_cost() == 4
    assert copy.edge_cost() == 4
    assert dag.intermediates() == []
    assert len(copy.intermediates()) == 1


def test_remove_target_drops_orphan_intermediate():
    dag = build_flat("abab", "abcc")
    t1, t2 = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3), (t2, 1)])
    report = dag.remove_targets_and_prune([t1])
    # v only had one use left (t2), so it must be inlined away
    assert report.inlined == [(v, enc("ab"))]
    assert report.deleted == []
    assert dag.parse_of(t2) == (0, 1, 2, 2)
    assert dag.intermediates() == []
    assert dag.validate() == []


def test_remove_target_deletes_zero_use_intermediate():
    dag = build_flat("abab")
    (t1,) = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3)])
    report = dag.remove_targets_and_prune([t1])
    assert report.deleted == [(v, enc("ab"))]
    assert report.inlined == []
    assert dag.targets() == []
    assert dag.edge_cost() == 0
    assert dag.validate() == []


def test_prune_cascades_through_layers():
    # two layers: w = ab, v = abab; both reused twice before removal
    dag = build_flat("ababab", "abababcc", "abcd")
    t1, t2, t3 = dag.targets()
    w = dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3), (t1, 5), (t2, 1), (t2, 3), (t2, 5), (t3, 1)])
    v = dag.add_intermediate(enc("abab"), [(t1, 1), (t2, 1)])
    assert dag.parse_of(t1) == (v, w)
    assert dag.parse_of(v) == (w, w)
    report = dag.remove_targets_and_prune([t1, t2])
    # v loses both uses -> deleted; w then drops to one use (t3) -> inlined
    assert (v, enc("abab")) in report.deleted
    assert (w, enc("ab")) in report.inlined
    assert dag.parse_of(t3) == (0, 1, 2, 3)
    assert dag.edge_cost() == 4
    assert dag.validate() == []


def test_prune_never_inflates_cost():
    dag = build_flat("abab", "ababcc", "ccdd")
    t1, t2, t3 = dag.targets()
    dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3), (t2, 1), (t2, 3)])
    dag.add_intermediate(enc("cc"), [(t2, 5), (t3, 1)])
    before = dag.edge_cost()
    dag.remove_targets_and_prune([t2])
    assert dag.edge_cost() < before
    assert dag.validate() == []


def test_remove_requires_target():
    dag = build_flat("abab")
    with pytest.raises(NotATargetError):
        dag.remove_targets_and_prune([0])


def test_rewrite_that_starves_intermediate_is_rejected():
    # x = ab used twice; trying to consume both uses into a larger node
    # without reusing x elsewhere must fail
    dag = build_flat("cabd", "dabc")
    t1, t2 = dag.targets()
    x = dag.add_intermediate(enc("ab"), [(t1, 2), (t2, 2)])
    with pytest.raises(IllegalRewriteError):
        dag.materialize_repeat([x, 3], [(t1, 1), (t2, 1)])
    assert dag.validate() == []


def test_materialize_repeat_splices_token_windows():
    dag = build_flat("abcabcd", "dabcabc")
    t1, t2 = dag.targets()
    cand = [(t1, 0), (t1, 3), (t2, 1), (t2, 4)]
    v = dag.add_intermediate(enc("abc"), [(h, o + 1) for h, o in cand])
    assert dag.out_degree(v) == 4
    w = dag.materialize_repeat([v, v], [(t1, 0), (t2, 1)])
    assert dag.string(w) == enc("abcabc")
    assert dag.parse_of(t1) == (w, 3)
    assert dag.parse_of(t2) == (3, w)
    assert dag.parse_of(w) == (v, v)
    assert dag.validate() == []


def test_snapshot_roundtrip():
    dag = build_flat("abab", "abcc")
    t1, t2 = dag.targets()
    dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3), (t2, 1)])
    text = dag.to_json()
    back = HierarchyDag.from_json(text)
    assert back.to_json() == text
    assert back.edge_cost() == dag.edge_cost()
    assert back.target_strings() == dag.target_strings()
    assert back.validate() == []


def test_snapshot_rejects_corruption():
    dag = build_flat("abab")
    snap = dag.to_snapshot()
    snap["parses"]["4"] = [0, 1]  # no longer spells the target
    with pytest.raises(ValueError):
        HierarchyDag.from_snapshot(snap)


def test_validate_reports_undercounted_reuse():
    dag = build_flat("abab", "abcc")
    t1, t2 = dag.targets()
    v = dag.add_intermediate(enc("ab"), [(t1, 1), (t1, 3), (t2, 1)])
    dag._parse[t2] = [0, 1, 2, 2]  # bypass the API to break reuse
    dag._out[v] -= 1
    issues = dag.validate()
    assert any(i.rule == "reuse" and i.node == v for i in issues)


def test_dot_output_mentions_every_node():
    dag = build_flat("abab")
    (t,) = dag.targets()
    dag.add_intermediate(enc("ab"), [(t, 1), (t, 3)])
    dot = dag.to_dot(AB)
    assert dot.startswith("digraph")
    for v in dag.node_ids():
        assert f"n{v} " in dot
    assert '"ab"' in dot


def test_target_order_is_creation_order():
    dag = build_flat("abab", "cccc", "abcd")
    names = [AB.render(s) for s in dag.target_strings()]
    assert names == ["abab", "cccc", "abcd"]
    dag.remove_targets_and_prune([dag.targets()[0]])
    names = [AB.render(s) for s in dag.target_strings()]
    assert names == ["cccc", "abcd"]

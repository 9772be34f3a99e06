"""Splitting layer: colored partitions, the prefix design lemma, the
coherent two-class split, the bipartite ladder, and the top-level
split-or-johnson reduction, pinned on small hand-checked structures."""

import math
from fractions import Fraction
from itertools import combinations, permutations

import pytest

from giso.errors import InternalInconsistency, ResourceLimitExceeded
from giso.relstruct import (
    RelStructure,
    f1_refine,
    f2_config,
    graph_structure,
    induced,
)
from giso.schemes import incidence_configuration, johnson_scheme, vertex_classes_of
from giso.soj import (
    BipartiteGraph,
    ColoredPartition,
    SoJOutcome,
    SplitError,
    _containment_relations,
    _dary_configuration,
    bipartite_soj,
    coherent_soj,
    design_lemma,
    johnson_id_defects,
    large_clique_twin_check,
    outcome_defects,
    small_right_side,
    split_or_johnson,
)
from giso.wl import wl


def closure(n, edges):
    return wl(f2_config(f1_refine(graph_structure(n, edges))))


def cycle_edges(n):
    return [(i, (i + 1) % n) for i in range(n)]


def bip(n1, n2, pairs):
    return BipartiteGraph(n1, n2, frozenset(pairs))


PETERSEN_EDGES = (
    [(i, (i + 1) % 5) for i in range(5)]
    + [(i, 5 + i) for i in range(5)]
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
)

FANO_BLOCKS = [
    (0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5),
]


def rook_coloring():
    """Cells of a 6x6 grid joined when they share a row or column; the
    complement class around any cell holds 25 of 36 vertices, so the
    splitter must take its bridge path."""
    cells = [(r, q) for r in range(6) for q in range(6)]
    idx = {rc: i for i, rc in enumerate(cells)}
    edges = [
        (idx[a], idx[b])
        for a, b in combinations(cells, 2)
        if a[0] == b[0] or a[1] == b[1]
    ]
    return closure(36, edges)


def wheel_and_triangle_graph():
    """Bipartite: left vertices are the edges of a chorded 5-wheel plus a
    disjoint triangle on 9 right vertices.  Degrees are uniform and the
    refined right side has only small color classes, driving the ladder
    into its no-dominant branch."""
    rim = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    hedges = rim + [(5, i) for i in range(5)] + [(1, 3)]
    hedges += [(6, 7), (7, 8), (8, 6)]
    pairs = [(i, w) for i, e in enumerate(hedges) for w in e]
    return bip(14, 9, pairs)


# ---------------------------------------------------------------------------
# colored partitions and outcome shells

def test_partition_requires_dense_colors_and_cover():
    with pytest.raises(SplitError):
        ColoredPartition((0, 1), (0, 2), (((0,),), ((1,),), ()))
    with pytest.raises(SplitError):
        ColoredPartition((0, 1, 2), (0, 0, 1), (((0,),), ((2,),)))
    with pytest.raises(SplitError):
        ColoredPartition((1, 0), (0, 0), (((0, 1),),))


def test_partition_parts_must_tile_evenly():
    ok = ColoredPartition((0, 1, 2, 3), (0, 0, 0, 0), (((0, 1), (2, 3)),))
    assert ok.part_sizes() == (2, 2)
    with pytest.raises(SplitError):
        ColoredPartition((0, 1, 2), (0, 0, 0), (((0, 1), (2,)),))


def test_partition_rejects_singleton_subdivision():
    # a class kept whole may be small, but cutting one into single
    # vertices is never admissible
    whole = ColoredPartition((4,), (0,), (((4,),),))
    assert whole.class_of(0) == (4,)
    with pytest.raises(SplitError):
        ColoredPartition((0, 1), (0, 0), (((0,), (1,)),))


def test_partition_alpha_defects():
    part = ColoredPartition((0, 1, 2), (0, 0, 1), (((0, 1),), ((2,),)))
    assert part.alpha_defects(Fraction(2, 3)) == ()
    assert part.alpha_defects(Fraction(1, 2)) != ()
    assert part.alpha_defects(Fraction(1, 2), total=4) == ()


def test_outcome_cost_must_match_multiplicities():
    part = ColoredPartition((0, 1), (0, 1), (((0,),), ((1,),)))
    with pytest.raises(SplitError):
        SoJOutcome("partition", part, None, (0, 1), (0,), (3,), 4, ())
    with pytest.raises(SplitError):
        SoJOutcome("johnson", part, None, (0, 1), (), (), 1, ())
    out = SoJOutcome("partition", part, None, (0, 1), (0,), (3,), 3, ())
    assert outcome_defects(out, (0, 1), Fraction(2, 3)) == ()


def test_bipartite_graph_validates_ranges():
    g = bip(3, 2, [(0, 0), (1, 1), (2, 0)])
    assert g.left_degrees() == (1, 1, 1)
    assert g.right_degrees() == (2, 1)
    with pytest.raises(SplitError):
        bip(2, 2, [(2, 0)])
    with pytest.raises(SplitError):
        bip(2, 2, [(0, 2)])


def test_johnson_id_defects_flag_tampering():
    good = johnson_scheme(5, 2)
    from giso.schemes import identify_johnson

    jid = identify_johnson(good, 5, 2)
    assert johnson_id_defects(jid, 10) == ()
    assert johnson_id_defects(jid, 9) != ()


# ---------------------------------------------------------------------------
# design lemma

def test_design_lemma_no_dominant_at_empty_prefix():
    inc = incidence_configuration(7, FANO_BLOCKS, split_sides=True)
    dl = design_lemma(inc, Fraction(3, 5))
    assert dl.case == "no_dominant"
    assert dl.prefix == ()
    # the two sides of the incidence are the color classes
    assert sorted(dl.coloring.class_sizes()) == [7, 7]


def test_design_lemma_extends_prefix_past_cliques():
    # at threshold one half, both seven-vertex sides are dominant and
    # both induce cliques, so a one-point prefix is needed
    inc = incidence_configuration(7, FANO_BLOCKS, split_sides=True)
    dl = design_lemma(inc, Fraction(1, 2))
    assert dl.case == "no_dominant"
    assert dl.prefix == (0,)


def test_design_lemma_non_clique_on_pentagon():
    dl = design_lemma(closure(5, cycle_edges(5)), Fraction(1, 2))
    assert dl.case == "non_clique"
    assert dl.prefix == ()
    assert dl.dominant_class == (0, 1, 2, 3, 4)
    assert dl.restriction.num_colors == 3


def test_design_lemma_ternary_collinearity():
    # collinearity of the seven-point plane: the plain 2-skeleton is a
    # clique by symmetry, so the lemma must fix one point first
    triples = frozenset(
        p for line in FANO_BLOCKS for p in permutations(line)
    )
    cfg = wl(f2_config(f1_refine(RelStructure(7, 3, (triples,)))))
    dl = design_lemma(cfg, Fraction(1, 2))
    assert dl.case == "non_clique"
    assert dl.prefix == (0,)
    assert dl.dominant_class == (1, 2, 3, 4, 5, 6)
    assert dl.restriction.num_colors == 3


def test_design_lemma_rejects_big_twin_classes():
    # complete bipartite two-three: the three-side vertices are twins
    k23 = closure(5, [(a, b) for a in (0, 1) for b in (2, 3, 4)])
    with pytest.raises(SplitError):
        design_lemma(k23, Fraction(1, 2))


def test_design_lemma_rejects_bad_arity_and_ratio():
    pent = closure(5, cycle_edges(5))
    with pytest.raises(SplitError):
        design_lemma(pent, Fraction(1, 3))
    with pytest.raises(SplitError):
        design_lemma(pent, Fraction(3, 2))
    tri = wl(
        f2_config(
            f1_refine(
                RelStructure(
                    4, 3, (frozenset(permutations((0, 1, 2))),)
                )
            )
        )
    )
    # arity three needs at least six vertices
    with pytest.raises(SplitError):
        design_lemma(tri, Fraction(1, 2))


def test_design_lemma_rejects_incoherent_input():
    path = f1_refine(graph_structure(3, [(0, 1), (1, 2)]))
    with pytest.raises(SplitError):
        design_lemma(path, Fraction(1, 2))


# ---------------------------------------------------------------------------
# large clique twin check

def test_clique_class_is_twin_class():
    k4 = closure(4, [(a, b) for a, b in combinations(range(4), 2)])
    assert large_clique_twin_check(k4, range(4)) is True


def test_non_clique_class_need_not_be_twins():
    pent = closure(5, cycle_edges(5))
    assert large_clique_twin_check(pent, range(5)) is False


def test_clique_check_rejects_small_classes():
    pent = closure(5, cycle_edges(5))
    with pytest.raises(SplitError):
        large_clique_twin_check(pent, (0, 1))


def test_clique_check_consistent_on_all_five_vertex_graphs():
    # exhaustively: for every graph closure and every vertex class
    # covering at least half, the check never trips its internal assert,
    # and clique classes always come back twins
    pairs = list(combinations(range(5), 2))
    for mask in range(1 << 10):
        edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
        cfg = closure(5, edges)
        for cls in vertex_classes_of(cfg):
            if 2 * len(cls) < 5:
                continue
            flag = large_clique_twin_check(cfg, cls)
            if len(cls) > 1 and induced(cfg, cls).num_colors <= 2:
                assert flag is True


# ---------------------------------------------------------------------------
# coherent two-class split

def test_coherent_split_partitions_imprimitive_large_side():
    # two triangles and a square; each triangle is joined to one
    # adjacent pair of the square, so the triangle colors are
    # disconnected inside the large side
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    edges += [(6, 7), (7, 8), (8, 9), (9, 6)]
    edges += [(i, 6 + j) for i in (0, 1, 2) for j in (0, 1)]
    edges += [(i, 6 + j) for i in (3, 4, 5) for j in (2, 3)]
    cfg = closure(10, edges)
    assert [len(c) for c in vertex_classes_of(cfg)] == [6, 4]
    cs = coherent_soj(cfg)
    assert cs.kind == "partition"
    assert cs.index_cost == 1
    assert cs.y is None
    assert cs.partition.cells == (((0, 1, 2), (3, 4, 5)),)


def test_coherent_split_on_edge_incidence():
    # the edge side of the Petersen incidence splits into five blocks of
    # three mutually far edges, again without fixing any point
    cfg = wl(
        incidence_configuration(
            10, [tuple(e) for e in PETERSEN_EDGES], split_sides=True
        )
    )
    assert [len(c) for c in vertex_classes_of(cfg)] == [10, 15]
    cs = coherent_soj(cfg)
    assert cs.kind == "partition"
    assert cs.index_cost == 1
    assert cs.partition.domain == tuple(range(10, 25))
    assert sorted(cs.partition.part_sizes()) == [3, 3, 3, 3, 3]


def test_coherent_split_rejects_clique_small_side():
    twos = list(combinations(range(5), 2))
    cfg = wl(incidence_configuration(5, twos, split_sides=True))
    with pytest.raises(SplitError):
        coherent_soj(cfg)


def test_coherent_split_rejects_equal_sides_and_one_class():
    inc = incidence_configuration(7, FANO_BLOCKS, split_sides=True)
    with pytest.raises(SplitError):
        coherent_soj(inc)
    with pytest.raises(SplitError):
        coherent_soj(johnson_scheme(5, 2))


def test_coherent_split_rejects_constant_cross():
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    edges += [(6, 7), (7, 8), (8, 6)]
    edges += [(i, j) for i in range(6) for j in (6, 7, 8)]
    cfg = closure(9, edges)
    assert len(vertex_classes_of(cfg)) == 2
    with pytest.raises(SplitError):
        coherent_soj(cfg)


# ---------------------------------------------------------------------------
# bipartite ladder

def test_small_left_side_is_memorized():
    g = bip(5, 3, [(0, 0), (1, 1), (2, 2), (3, 0), (4, 1), (0, 1)])
    out = bipartite_soj(g, Fraction(2, 3))
    assert out.kind == "partition"
    assert out.stabilized == (0, 1, 2, 3, 4)
    assert out.multiplicities == (5, 4, 3, 2, 1)
    assert out.index_cost == 120
    assert all(len(p) == 1 for parts in out.partition.cells for p in parts)


def test_twin_and_degree_split_is_free():
    pairs = [(i, 0) for i in range(6)] + [(i, 1) for i in range(6, 12)]
    pairs += [(12, 0), (12, 1)]
    out = bipartite_soj(bip(13, 2, pairs), Fraction(2, 3))
    assert out.kind == "partition"
    assert out.index_cost == 1
    assert sorted(out.partition.part_sizes(), reverse=True) == [6, 6, 1]


def test_complete_neighborhood_family_identifies_subsets():
    m = 8
    subs = list(combinations(range(m), 2))
    pairs = [(i, w) for i, s in enumerate(subs) for w in s]
    out = bipartite_soj(bip(len(subs), m, pairs), Fraction(2, 3))
    assert out.kind == "johnson"
    assert (out.johnson.m, out.johnson.s) == (8, 2)
    assert out.index_cost == 1
    assert out.support == tuple(range(28))
    # the recovered subsets are the neighborhoods themselves
    assert out.johnson.point_to_set == tuple(frozenset(s) for s in subs)


def test_complement_switch_keeps_degree_small():
    subs = list(combinations(range(6), 2))
    pairs = [
        (i, w) for i, s in enumerate(subs) for w in range(6) if w not in s
    ]
    out = bipartite_soj(bip(15, 6, pairs), Fraction(2, 3))
    assert out.kind == "johnson"
    assert (out.johnson.m, out.johnson.s) == (6, 2)
    assert any("complemented" in line for line in out.trace)


def test_pointwise_right_side_colors_by_neighborhood():
    twos = list(combinations(range(5), 2))[:9]
    pairs = [(i, w) for i, s in enumerate(twos) for w in s]
    pairs += [(9 + j, 0) for j in range(4)]
    out = bipartite_soj(bip(13, 5, pairs), Fraction(2, 3))
    assert out.kind == "partition"
    # right side vertices are ledgered with the left-side offset
    assert out.stabilized == (13, 14, 15, 16, 17)
    assert out.multiplicities == (5, 4, 3, 2, 1)
    assert out.index_cost == 120
    assert sorted(out.partition.part_sizes(), reverse=True) == [4] + [1] * 9


def test_deep_descent_without_any_choices():
    out = bipartite_soj(wheel_and_triangle_graph(), Fraction(2, 3),
                        small_v2_cutoff=0)
    assert out.kind == "partition"
    assert out.index_cost == 1
    assert sorted(out.partition.part_sizes(), reverse=True) == [6, 4, 2, 2]
    assert any("no dominant color" in line for line in out.trace)
    for part in out.partition.part_sizes():
        assert Fraction(part) <= Fraction(2, 3) * 14


def test_arity_cap_raises_resource_error():
    import random

    rng = random.Random(7)
    subs = set()
    while len(subs) < 20:
        subs.add(frozenset(rng.sample(range(11), 5)))
    pairs = [
        (i, w) for i, s in enumerate(sorted(subs, key=sorted)) for w in s
    ]
    with pytest.raises(ResourceLimitExceeded):
        bipartite_soj(bip(20, 11, pairs), Fraction(2, 3), small_v2_cutoff=0)


def test_bipartite_preconditions():
    g = bip(6, 5, [(i, i % 5) for i in range(6)])
    with pytest.raises(SplitError):
        bipartite_soj(g, Fraction(2, 3))  # right side not below beta
    with pytest.raises(SplitError):
        bipartite_soj(bip(3, 1, [(0, 0)]), Fraction(1, 2))  # ratio floor
    twins = bip(9, 2, [(i, 0) for i in range(7)] + [(7, 1), (8, 1)])
    with pytest.raises(SplitError):
        bipartite_soj(twins, Fraction(2, 3))  # seven of nine are twins


def test_small_right_side_formula():
    assert small_right_side(13) == int((6 * math.log2(13)) ** 1.5)
    assert small_right_side(2) <= small_right_side(100)


# ---------------------------------------------------------------------------
# containment counts and the design floor

def test_containment_relations_group_by_count():
    family = [frozenset(s) for s in [(0, 1, 2), (0, 1, 3), (2, 3, 4)]]
    rels, buckets = _containment_relations(5, family, 2)
    assert buckets >= 2
    total = sum(len(r) for r in rels)
    assert total == 5 * 4  # every ordered pair of distinct points


def test_containment_coloring_refines_when_counts_vary():
    family = [frozenset(s) for s in [(0, 1, 2), (0, 1, 3), (2, 3, 4)]]
    cfg = _dary_configuration(5, family, 2, 3, len(family))
    assert cfg.k == 2
    assert cfg.is_coherent


def test_uniform_counts_hit_the_design_floor():
    # all three-subsets of a six-set: every pair is covered equally, and
    # twenty blocks clear the floor, so the refinement gives up honestly
    family = [frozenset(s) for s in combinations(range(6), 3)]
    with pytest.raises(ResourceLimitExceeded):
        _dary_configuration(6, family, 2, 3, len(family))
    # claiming fewer blocks than points contradicts the design bound
    with pytest.raises(InternalInconsistency):
        _dary_configuration(6, family, 2, 3, 4)


# ---------------------------------------------------------------------------
# split or johnson

def test_whole_coloring_identified_as_subset_scheme():
    out = split_or_johnson(johnson_scheme(7, 2))
    assert out.kind == "johnson"
    assert (out.johnson.m, out.johnson.s) == (7, 2)
    assert out.index_cost == 1
    assert out.stabilized == ()
    assert out.support == tuple(range(21))


def test_disjointness_coloring_is_the_same_scheme():
    # the Kneser-style coloring on ten vertices is the 2-subsets of five
    out = split_or_johnson(closure(10, PETERSEN_EDGES))
    assert out.kind == "johnson"
    assert (out.johnson.m, out.johnson.s) == (5, 2)
    assert out.index_cost == 1


def test_heptagon_splits_around_one_point():
    out = split_or_johnson(closure(7, cycle_edges(7)))
    assert out.kind == "partition"
    assert out.stabilized == (0,)
    assert out.index_cost == 7
    assert sorted(out.partition.part_sizes(), reverse=True) == [2, 2, 2, 1]


def test_rook_coloring_reaches_the_bridge():
    cfg = rook_coloring()
    out = split_or_johnson(cfg)
    assert out.kind == "partition"
    # one base point, then the ten-vertex right side fixed pointwise
    assert out.index_cost == 36 * math.factorial(10)
    assert len(out.stabilized) == 11
    assert out.stabilized[0] == 0
    sizes = sorted(out.partition.part_sizes(), reverse=True)
    assert sizes[0] == 10 and sizes[1:] == [1] * 26
    assert outcome_defects(out, range(36), Fraction(2, 3)) == ()


def test_rook_deep_path_splits_the_rows_and_columns():
    cfg = rook_coloring()
    out = split_or_johnson(cfg, small_v2_cutoff=0)
    assert out.kind == "partition"
    assert out.index_cost == 360
    assert sorted(out.partition.part_sizes(), reverse=True) == (
        [10] + [5] * 5 + [1]
    )
    assert any("block anchor" in line for line in out.trace)


def test_rook_runs_are_reproducible():
    cfg = rook_coloring()
    a = split_or_johnson(cfg, small_v2_cutoff=0)
    b = split_or_johnson(cfg, small_v2_cutoff=0)
    assert a == b
    assert a.trace == b.trace


def test_split_rejects_non_uniprimitive_colorings():
    with pytest.raises(SplitError):
        split_or_johnson(closure(4, cycle_edges(4)))  # imprimitive
    with pytest.raises(SplitError):
        split_or_johnson(
            closure(5, [(a, b) for a, b in combinations(range(5), 2)])
        )  # complete
    with pytest.raises(SplitError):
        split_or_johnson(closure(7, cycle_edges(7)), Fraction(1, 2))


def test_outcomes_stay_inside_the_index_budget():
    for out, n in [
        (split_or_johnson(closure(7, cycle_edges(7))), 7),
        (split_or_johnson(rook_coloring()), 36),
    ]:
        assert out.index_cost == math.prod(out.multiplicities)
        if out.index_cost > 1:
            assert (
                out.index_cost.bit_length() - 1
                <= 4 * math.log2(n) ** 2
            )

"""Classical pair-coloring analysis, subset scheme recovery, and design
counting, pinned by a hand-checkable 15-vertex worked example and by
brute-force searches."""

import itertools
import random
from math import comb

import pytest

from giso.errors import InternalInconsistency
from giso.perm import GenSet, Permutation, alternating_gens, symmetric_gens
from giso.relstruct import Configuration, f1_refine, graph_structure, orbital_configuration
from giso.schemes import (
    AltActionId,
    ClassicalSummary,
    JohnsonId,
    SchemeError,
    check_design,
    classify_classical,
    identify_alt_action,
    identify_johnson,
    incidence_configuration,
    johnson_scheme,
    paired_color,
    pointed_semiregular_witness,
    search_2_designs,
    semiregular_checks,
    subset_action,
    vertex_classes_of,
)
from giso.wl import check_coherent, intersection_number


def perm(n, *cycles):
    return Permutation.from_cycles(n, cycles)


def graph_config(n, edges):
    return f1_refine(graph_structure(n, edges))


def cycle_edges(n):
    return [(i, (i + 1) % n) for i in range(n)]


PETERSEN_EDGES = (
    [(i, (i + 1) % 5) for i in range(5)]
    + [(i, 5 + i) for i in range(5)]
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
)

FANO_BLOCKS = [
    (0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5),
]


def difference_configuration(n):
    """Pairs of Z/n colored by the difference y - x mod n."""
    colors = tuple((y - x) % n for x in range(n) for y in range(n))
    return Configuration(n, 2, colors)


# ---------------------------------------------------------------------------
# the 15-vertex worked example: pair scheme of a 6-set in disguise

PAIR_TABLE = """
x z y y z y y z z z y y z z z
z x y z z y y y z y z z z z y
y y x y y z z z y z z z z z y
y z y x z z z y z y z z y y z
z z y z x y y z y z z z y y z
y y z z y x z z z y z y y z z
y y z z y z x y z z y z z y z
z y z y z z y x y z z y y z z
z z y z y z z y x y y y z z z
z y z y z y z z y x y z z y z
y z z z z z y z y y x z y z y
y z z z z y z y y z z x z y y
z z z y y y z y z z y z x z y
z z z y y z y z z y z y z x y
z y y z z z z z z z y y y y x
"""

LETTER = {"x": 0, "y": 1, "z": 2}


def worked_example():
    rows = [line.split() for line in PAIR_TABLE.strip().splitlines()]
    assert len(rows) == 15 and all(len(r) == 15 for r in rows)
    colors = tuple(LETTER[c] for row in rows for c in row)
    return Configuration(15, 2, colors)


# 1-based sets from the worked solution, shifted to 0-based vertex ranks.
def _shift(*one_based):
    return frozenset(i - 1 for i in one_based)


WORKED_B_SETS = {
    (1, 2): _shift(8, 10, 15),
    (1, 5): _shift(9, 13, 14),
    (1, 8): _shift(2, 9, 13),
    (1, 9): _shift(5, 8, 10),
    (1, 10): _shift(2, 9, 14),
    (1, 13): _shift(5, 8, 15),
    (1, 14): _shift(5, 10, 15),
    (1, 15): _shift(2, 13, 14),
}

WORKED_LAMBDAS = {
    1: _shift(1, 5, 8, 10, 15),
    2: _shift(1, 2, 9, 13, 14),
    3: _shift(2, 4, 5, 11, 12),
    4: _shift(3, 7, 10, 12, 13),
    5: _shift(3, 6, 8, 11, 14),
    6: _shift(4, 6, 7, 9, 15),
}

WORKED_IOTA = {
    1: {1, 2}, 2: {2, 3}, 3: {4, 5}, 4: {3, 6}, 5: {1, 3},
    6: {5, 6}, 7: {4, 6}, 8: {1, 5}, 9: {2, 6}, 10: {1, 4},
    11: {3, 5}, 12: {3, 4}, 13: {2, 4}, 14: {2, 5}, 15: {1, 6},
}


def test_worked_table_is_a_coherent_uniprimitive_scheme():
    c = worked_example()
    for u in range(15):
        for v in range(15):
            assert c.color((u, v)) == c.color((v, u))
    assert c.class_sizes() == (15, 90, 120)
    assert check_coherent(c).coherent
    summary = classify_classical(c)
    assert summary.homogeneous and summary.uniprimitive
    assert not summary.trivial_clique


def b_set(cfg, delta, x, y):
    return frozenset(
        z
        for z in range(cfg.gamma_size)
        if cfg.color((x, z)) != delta and cfg.color((y, z)) == delta
    )


def c_set(cfg, delta, x, y):
    b = b_set(cfg, delta, x, y)
    return frozenset(
        r
        for r in range(cfg.gamma_size)
        if all(cfg.color((z, r)) != delta for z in b)
    )


def test_worked_table_b_and_c_sets():
    c = worked_example()
    delta = LETTER["y"]  # the smaller of the two off-diagonal classes
    partners = {v for v in range(15) if c.color((0, v)) == LETTER["z"]}
    assert partners == {j - 1 for _, j in WORKED_B_SETS}
    for (i, j), frozen in WORKED_B_SETS.items():
        assert b_set(c, delta, i - 1, j - 1) == frozen
    assert c_set(c, delta, 0, 1) == WORKED_LAMBDAS[1]
    assert c_set(c, delta, 0, 4) == WORKED_LAMBDAS[2]
    assert c_set(c, delta, 0, 8) == WORKED_LAMBDAS[1]
    assert c_set(c, delta, 0, 7) == WORKED_LAMBDAS[2]


def test_worked_table_identification_matches_solution():
    c = worked_example()
    jid = identify_johnson(c, 6, 2)
    assert jid.color_to_intersection == {LETTER["x"]: 2, LETTER["y"]: 0, LETTER["z"]: 1}
    assert set(jid.lambda_sets) == set(WORKED_LAMBDAS.values())
    assert list(jid.lambda_sets) == sorted(jid.lambda_sets, key=sorted)
    relabel = {
        paper: jid.lambda_sets.index(members)
        for paper, members in WORKED_LAMBDAS.items()
    }
    for i, lams in WORKED_IOTA.items():
        assert jid.point_to_set[i - 1] == {relabel[p] for p in lams}


# ---------------------------------------------------------------------------
# subset schemes and their identification


def test_scheme_point_and_color_counts():
    j52 = johnson_scheme(5, 2)
    assert j52.gamma_size == 10 and j52.num_colors == 3
    j62 = johnson_scheme(6, 2)
    assert j62.gamma_size == 15
    sizes = j62.class_sizes()
    assert sizes[2] == 90 and sizes[1] == 120  # disjoint vs sharing a point


def test_scheme_parameter_validation():
    with pytest.raises(SchemeError):
        johnson_scheme(4, 2)
    with pytest.raises(SchemeError):
        johnson_scheme(7, 1)


@pytest.mark.parametrize("m,s", [(5, 2), (6, 2), (7, 2), (8, 2), (7, 3), (8, 3)])
def test_schemes_are_coherent(m, s):
    assert check_coherent(johnson_scheme(m, s)).coherent


def assert_valid_subset_id(cfg, jid):
    """The defining invariants, recomputed independently of the library's
    own post-verification."""
    assert len(jid.lambda_sets) == jid.m
    assert len(set(jid.point_to_set)) == cfg.gamma_size == comb(jid.m, jid.s)
    assert all(len(ps) == jid.s for ps in jid.point_to_set)
    for u in range(cfg.gamma_size):
        for v in range(cfg.gamma_size):
            overlap = len(jid.point_to_set[u] & jid.point_to_set[v])
            assert overlap == jid.color_to_intersection[cfg.color((u, v))]


@pytest.mark.parametrize("m", [6, 7, 8])
def test_identify_relabeled_pair_schemes(m):
    rng = random.Random(100 + m)
    images = list(range(comb(m, 2)))
    rng.shuffle(images)
    cfg = johnson_scheme(m, 2).permuted(Permutation(tuple(images)))
    jid = identify_johnson(cfg, m, 2)
    assert_valid_subset_id(cfg, jid)


def test_identify_relabeled_triple_scheme():
    rng = random.Random(73)
    images = list(range(35))
    rng.shuffle(images)
    cfg = johnson_scheme(7, 3).permuted(Permutation(tuple(images)))
    jid = identify_johnson(cfg, 7, 3)
    assert_valid_subset_id(cfg, jid)


def test_identify_petersen_as_pair_scheme():
    # the disjointness coloring of 2-subsets of a 5-set, palette reversed
    cfg = graph_config(10, PETERSEN_EDGES)
    jid = identify_johnson(cfg, 5, 2)
    assert_valid_subset_id(cfg, jid)
    assert jid.color_to_intersection[0] == 0  # graph edges are disjoint pairs


def test_identify_rejections_are_witnessed():
    with pytest.raises(SchemeError):
        identify_johnson(johnson_scheme(6, 2), 7, 2)
    with pytest.raises(SchemeError, match="verified"):
        identify_johnson(difference_configuration(15), 6, 2)
    with pytest.raises(SchemeError):
        identify_johnson(graph_config(6, cycle_edges(6)), 4, 2)  # not coherent


def induced_subset_gens(m, s, base):
    return GenSet(comb(m, s), tuple(subset_action(m, s, g) for g in base.gens))


def test_alt_action_on_pairs_of_six():
    aid = identify_alt_action(induced_subset_gens(6, 2, alternating_gens(6)), 6, 2)
    assert aid.m == 6 and aid.k == 2
    assert {len(l) for l in aid.lambda_sets} == {5}
    # images generate the even group on the recovered points
    hom = aid.action_hom()
    assert hom.image_order() == 360


def test_alt_action_equivariance_checked_independently():
    base = alternating_gens(8)
    gens = induced_subset_gens(8, 2, base)
    aid = identify_alt_action(gens, 8, 2)
    for g, gm in zip(gens.gens, aid.generator_images):
        for w in range(gens.degree):
            assert aid.point_to_set[g.images[w]] == frozenset(
                gm.images[i] for i in aid.point_to_set[w]
            )


def test_alt_action_accepts_full_symmetric_input():
    aid = identify_alt_action(induced_subset_gens(7, 2, symmetric_gens(7)), 7, 2)
    assert aid.action_hom().image_order() == 5040


def test_alt_action_natural_relabeling():
    aid = identify_alt_action(alternating_gens(6), 6, 1)
    assert all(len(l) == 1 for l in aid.lambda_sets)
    assert {len(ps) for ps in aid.point_to_set} == {1}


def test_alt_action_preconditions():
    with pytest.raises(SchemeError, match="transitive"):
        identify_alt_action(GenSet(6, (perm(6, (0, 1)),)), 4, 2)
    with pytest.raises(SchemeError, match="degree"):
        identify_alt_action(alternating_gens(6), 5, 2)


def test_alt_action_rejects_non_subset_structure():
    # transitive of degree 15 = C(6,2), but cyclic: verification must fail
    gens = GenSet(15, (perm(15, tuple(range(15))),))
    with pytest.raises(SchemeError, match="verified"):
        identify_alt_action(gens, 6, 2)


# ---------------------------------------------------------------------------
# classification


def test_clique_classification():
    summary = classify_classical(graph_config(5, itertools.combinations(range(5), 2)))
    assert summary.trivial_clique and summary.primitive
    assert not summary.uniprimitive


def test_difference_coloring_imprimitive():
    summary = classify_classical(difference_configuration(4))
    assert summary.homogeneous and not summary.primitive
    two_step = summary.graph_for(2)
    assert two_step.components == ((0, 2), (1, 3))
    assert summary.graph_for(1).connected and summary.graph_for(3).connected


def test_classification_requires_coherence():
    with pytest.raises(SchemeError, match="coherent"):
        classify_classical(graph_config(6, cycle_edges(6)))
    with pytest.raises(SchemeError, match="arity"):
        classify_classical(Configuration(3, 1, (0, 1, 2)))


def test_incidence_scheme_of_symmetric_design():
    c = incidence_configuration(7, FANO_BLOCKS)
    summary = classify_classical(c)
    # one vertex class: the coloring cannot tell points from blocks
    assert summary.homogeneous
    assert not summary.primitive
    same_side = summary.graph_for(1)
    assert same_side.components == (tuple(range(7)), tuple(range(7, 14)))
    assert same_side.out_degree == 6
    belongs = summary.graph_for(2)
    assert belongs.connected and belongs.out_degree == 3
    avoids = summary.graph_for(3)
    assert avoids.connected and avoids.out_degree == 4


def test_incidence_scheme_of_non_symmetric_design_rejected():
    pairs = list(itertools.combinations(range(4), 2))
    with pytest.raises(SchemeError, match="coherent"):
        classify_classical(incidence_configuration(4, pairs))


def test_out_degrees_match_intersection_numbers():
    for cfg in [johnson_scheme(6, 2), graph_config(10, PETERSEN_EDGES),
                incidence_configuration(7, FANO_BLOCKS)]:
        summary = classify_classical(cfg)
        classes = summary.vertex_classes
        for cg in summary.color_graphs:
            source = classes[cg.source_class][0]
            diag = cfg.color((source, source))
            expected = intersection_number(
                cfg, (paired_color(cfg, cg.color), cg.color), diag
            )
            assert cg.out_degree == expected


# ---------------------------------------------------------------------------
# structural consequences of coherence


UNIPRIMITIVE = [
    johnson_scheme(5, 2),
    johnson_scheme(6, 2),
    johnson_scheme(7, 2),
    johnson_scheme(7, 3),
    graph_config(5, cycle_edges(5)),
    graph_config(10, PETERSEN_EDGES),
]


def offdiag_colors(cfg):
    out = []
    for color, pairs in sorted(cfg.fibers().items()):
        if pairs[0][0] != pairs[0][1]:
            out.append((color, pairs))
    return out


@pytest.mark.parametrize("idx", range(len(UNIPRIMITIVE)))
def test_some_color_dominates_the_square_root(idx):
    cfg = UNIPRIMITIVE[idx]
    summary = classify_classical(cfg)
    assert summary.uniprimitive
    degrees = {cg.color: cg.out_degree for cg in summary.color_graphs}
    for r, d in degrees.items():
        assert any(
            other != r and degrees[other] ** 2 >= d for other in degrees
        )


@pytest.mark.parametrize("idx", range(len(UNIPRIMITIVE)))
def test_color_complements_have_diameter_two(idx):
    cfg = UNIPRIMITIVE[idx]
    n = cfg.gamma_size
    for r, _ in offdiag_colors(cfg):
        linked = [
            {v for v in range(n) if v != u and cfg.color((u, v)) != r}
            for u in range(n)
        ]
        for u in range(n):
            for v in range(n):
                if u == v or v in linked[u]:
                    continue
                assert any(v in linked[w] for w in linked[u])


def test_disconnected_colors_constrain_all_others():
    for cfg in [difference_configuration(4), difference_configuration(6),
                incidence_configuration(7, FANO_BLOCKS)]:
        summary = classify_classical(cfg)
        for cg in summary.color_graphs:
            if cg.connected or cg.source_class != cg.target_class:
                continue
            cell_of = {}
            for i, cell in enumerate(cg.components):
                for v in cell:
                    cell_of[v] = i
            for other in summary.color_graphs:
                if other.color == cg.color:
                    continue
                pairs = [
                    t
                    for t in itertools.product(range(cfg.gamma_size), repeat=2)
                    if t[0] != t[1] and cfg.color(t) == other.color
                ]
                within = [t for t in pairs if
                          t[0] in cell_of and t[1] in cell_of]
                if not within:
                    continue
                refines = all(cell_of[a] == cell_of[b] for a, b in within)
                crosses = all(cell_of[a] != cell_of[b] for a, b in within)
                assert refines or crosses


def test_equal_component_sizes_is_enforced():
    for cfg in [difference_configuration(6), johnson_scheme(6, 2)]:
        summary = classify_classical(cfg)
        for cg in summary.color_graphs:
            assert len({len(cell) for cell in cg.components}) == 1


# ---------------------------------------------------------------------------
# semiregularity


def test_semiregular_report_clean_on_coherent_inputs():
    for cfg in [
        incidence_configuration(7, FANO_BLOCKS, split_sides=True),
        orbital_configuration(GenSet(6, (perm(6, (0, 1, 2, 3), (4, 5)),)), 2),
        johnson_scheme(6, 2),
    ]:
        report = semiregular_checks(cfg)
        assert report.ok, report


def test_semiregular_contraction_over_components():
    # two classes; the intra color on the big class is disconnected, so the
    # contracted graph is a genuine quotient and must still be semiregular
    gens = GenSet(6, (perm(6, (0, 1, 2, 3), (4, 5)),))
    cfg = orbital_configuration(gens, 2)
    summary = classify_classical(cfg)
    assert any(
        not cg.connected and cg.source_class == cg.target_class
        for cg in summary.color_graphs
    )
    assert semiregular_checks(cfg).ok


def bipartite_coloring(left, right, edges):
    """Distinct diagonal and within-side colors per side, one color pair
    for edges and one for non-edges, each split by direction."""
    n = left + right
    is_left = lambda v: v < left
    edge_set = {(u, left + v) for u, v in edges}

    def color(u, v):
        if u == v:
            return 0 if is_left(u) else 1
        if is_left(u) and is_left(v):
            return 2
        if not is_left(u) and not is_left(v):
            return 3
        if is_left(u):
            return 4 if (u, v) in edge_set else 5
        return 6 if (v, u) in edge_set else 7

    colors = tuple(color(u, v) for u in range(n) for v in range(n))
    return Configuration(n, 2, colors)


def test_semiregular_witness_on_lopsided_bipartite_coloring():
    cfg = bipartite_coloring(3, 4, [(0, 0), (0, 1), (0, 2), (1, 0)])
    report = semiregular_checks(cfg)
    assert not report.ok
    assert any("out-side" in w or "in-side" in w for w in report.cross_failures)


def test_contracted_witness_when_components_are_covered_unevenly():
    # red pairs the big side into {3,4} and {5,6}; only vertex 0 reaches one
    n = 7
    red = {(3, 4), (4, 3), (5, 6), (6, 5)}

    def color(u, v):
        if u == v:
            return 0 if u < 3 else 1
        if u < 3 and v < 3:
            return 2
        if u >= 3 and v >= 3:
            return 3 if (u, v) in red else 4
        if u < 3:
            return 5 if (u, v) == (0, 3) else 6
        return 7 if (v, u) == (0, 3) else 8

    cfg = Configuration(n, 2, tuple(color(u, v) for u in range(n) for v in range(n)))
    report = semiregular_checks(cfg)
    assert not report.ok
    assert report.contracted_failures


def test_pointed_semiregularity_on_coherent_input():
    cfg = incidence_configuration(7, FANO_BLOCKS)
    for y in range(cfg.gamma_size):
        for aqua, beige, cyan in itertools.product(range(4), repeat=3):
            assert pointed_semiregular_witness(cfg, y, aqua, beige, cyan) is None


def test_pointed_semiregularity_witnesses_incoherence():
    cfg = graph_config(6, cycle_edges(6))
    witnesses = [
        pointed_semiregular_witness(cfg, y, aqua, beige, cyan)
        for y in range(6)
        for aqua, beige, cyan in itertools.product(range(3), repeat=3)
    ]
    assert any(w is not None for w in witnesses)


# ---------------------------------------------------------------------------
# designs


def test_design_check_fano():
    res = check_design(7, FANO_BLOCKS, 2)
    assert res.is_t_design and res.lam == 1
    assert res.b == 7 == res.v  # the Fisher bound holds with equality
    assert res.fisher_ok and res.subset_bound_ok


def test_design_check_triple_count_fails_for_fano():
    assert not check_design(7, FANO_BLOCKS, 3).is_t_design


def test_complete_uniform_hypergraph_is_a_design():
    blocks = list(itertools.combinations(range(6), 3))
    res3 = check_design(6, blocks, 3)
    assert res3.is_t_design and res3.lam == 1 and res3.b == comb(6, 3)
    res2 = check_design(6, blocks, 2)
    assert res2.is_t_design and res2.lam == 4
    assert res2.fisher_ok


def test_design_check_input_validation():
    with pytest.raises(SchemeError, match="uniform"):
        check_design(5, [(0, 1, 2), (0, 1)], 2)
    with pytest.raises(SchemeError, match="uniform"):
        check_design(5, [(0, 1, 1)], 2)
    with pytest.raises(SchemeError, match="range"):
        check_design(3, [(0, 1, 5)], 2)
    with pytest.raises(SchemeError, match="edge"):
        check_design(3, [], 2)


FROZEN_DESIGN_COUNTS = {
    (7, 3, 1): 30,
    (6, 3, 2): 12,
    (7, 3, 2): 120,
    (4, 3, 2): 1,
    (7, 4, 2): 30,
}


def test_design_search_agrees_with_frozen_counts():
    for (v, u, lam), expect in FROZEN_DESIGN_COUNTS.items():
        assert len(search_2_designs(v, u, lam)) == expect


def test_design_search_finds_only_lawful_designs():
    for v in range(2, 9):
        for u in range(2, min(4, v) + 1):
            for lam in (1, 2):
                for blocks in search_2_designs(v, u, lam):
                    res = check_design(v, blocks, 2)
                    assert res.is_t_design and res.lam == lam
                    assert res.fisher_ok and res.subset_bound_ok
                    assert res.b == lam * comb(v, 2) // comb(u, 2)


def test_design_search_fano_is_fisher_tight():
    for blocks in search_2_designs(7, 3, 1):
        assert check_design(7, blocks, 2).b == 7


def test_design_search_space_is_capped():
    with pytest.raises(SchemeError, match="capped"):
        search_2_designs(11, 3, 1)

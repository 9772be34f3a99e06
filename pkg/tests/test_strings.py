"""String action, isomorphism cosets, and the recursive solver, checked
against plain product-closure enumeration."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giso.errors import InternalInconsistency, ResourceLimitExceeded
from giso.perm import (
    GenSet,
    Permutation,
    alternating_gens,
    enumerate_elements,
    group_order,
    symmetric_gens,
)
from giso.strings import (
    ColoredString,
    IsoCoset,
    RecursionBudget,
    StringError,
    align_letter_classes,
    coset_shift,
    coset_union,
    format_string_file,
    iso_window,
    luks_iso,
    natural_action_iso,
    parse_string_file,
)


def perm(n, *cycles):
    return Permutation.from_cycles(n, cycles)


def string(text):
    """Letters a..z packed into a small alphabet."""
    alphabet = sorted(set(text))
    return ColoredString(tuple(alphabet.index(c) for c in text), len(alphabet))


_ORACLE_CACHE = {}


def brute_iso(gens, x, y):
    """Every group element mapping x to y, by independent closure."""
    if gens not in _ORACLE_CACHE:
        _ORACLE_CACHE[gens] = enumerate_elements(gens)
    hits = []
    for g in _ORACLE_CACHE[gens]:
        if x.permuted(g) == y:
            hits.append(g)
    return sorted(hits)


def assert_matches_brute(gens, x, y):
    expect = brute_iso(gens, x, y)
    got = luks_iso(gens, x, y)
    assert sorted(got.elements()) == expect
    if expect:
        assert got.order() == len(expect)


# ---------------------------------------------------------------------------
# the string action


class TestColoredString:
    def test_action_moves_letters_to_image_positions(self):
        x = ColoredString((5, 6, 7), 8)
        g = perm(3, (0, 1, 2))
        assert x.permuted(g).letters == (7, 5, 6)

    def test_rejects_letters_outside_alphabet(self):
        with pytest.raises(StringError):
            ColoredString((0, 3), 3)

    def test_restriction_keeps_window_order(self):
        x = ColoredString((4, 5, 6, 7), 8)
        assert x.restricted([3, 1]).letters == (5, 7)

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_action_is_a_right_action(self, data):
        n = data.draw(st.integers(3, 7))
        letters = data.draw(
            st.tuples(*[st.integers(0, 2) for _ in range(n)])
        )
        x = ColoredString(letters, 3)
        p_images = data.draw(st.permutations(range(n)))
        q_images = data.draw(st.permutations(range(n)))
        p, q = Permutation(tuple(p_images)), Permutation(tuple(q_images))
        assert x.permuted(p * q) == x.permuted(p).permuted(q)

    def test_letter_counts(self):
        assert string("aabbbc").letter_counts() == (2, 3, 1)


# ---------------------------------------------------------------------------
# cosets


class TestIsoCoset:
    def test_empty_is_shared_and_sized_zero(self):
        assert IsoCoset.empty().is_empty()
        assert IsoCoset.empty().order() == 0
        assert IsoCoset.empty().elements() == []

    def test_contains_and_order(self):
        aut = GenSet(4, (perm(4, (0, 1)),))
        rep = perm(4, (2, 3))
        coset = IsoCoset.of(aut, rep)
        assert coset.order() == 2
        assert coset.contains(perm(4, (2, 3)))
        assert coset.contains(perm(4, (0, 1), (2, 3)))
        assert not coset.contains(perm(4, (0, 1)))

    def test_shift_translates_every_element(self):
        aut = GenSet(4, (perm(4, (0, 1)),))
        coset = IsoCoset.of(aut, Permutation.identity(4))
        sigma = perm(4, (1, 2, 3))
        shifted = coset_shift(coset, sigma)
        assert sorted(shifted.elements()) == sorted(
            e * sigma for e in coset.elements()
        )

    def test_union_reassembles_a_tiled_coset(self):
        # the two pieces tile <(0 1), (2 3)> exactly
        aut = GenSet(4, (perm(4, (0, 1)),))
        pieces = [
            IsoCoset.of(aut, Permutation.identity(4)),
            IsoCoset.of(aut, perm(4, (2, 3))),
        ]
        merged = coset_union(pieces)
        expect = sorted({e for p in pieces for e in p.elements()})
        assert sorted(merged.elements()) == expect
        assert merged.order() == 4

    def test_union_of_empties_is_empty(self):
        assert coset_union([IsoCoset.empty(), IsoCoset.empty()]).is_empty()

    def test_union_rejects_mismatched_groups(self):
        a = IsoCoset.of(GenSet(4, (perm(4, (0, 1)),)), Permutation.identity(4))
        b = IsoCoset.of(GenSet(4, (perm(4, (0, 2)),)), perm(4, (2, 3)))
        with pytest.raises(InternalInconsistency):
            coset_union([a, b])


# ---------------------------------------------------------------------------
# the solver against brute force

# [DERIVED] by enumerating <(0 2)(1 3)> = {e, (0 2)(1 3)} directly: only the
# non-identity element maps aabb to bbaa, so Aut is trivial and the
# representative is forced.
def test_frozen_swap_example():
    gens = GenSet(4, (perm(4, (0, 2), (1, 3)),))
    result = luks_iso(gens, string("aabb"), string("bbaa"))
    assert result.order() == 1
    assert result.rep == perm(4, (0, 2), (1, 3))
    assert [g.is_identity() for g in result.aut_gens.gens] in ([], [True])


def test_identity_group_direct_check():
    gens = GenSet.trivial(3)
    assert not luks_iso(gens, string("abc"), string("abc")).is_empty()
    assert luks_iso(gens, string("abc"), string("acb")).is_empty()


def test_letter_count_mismatch_is_empty():
    gens = GenSet(4, tuple(symmetric_gens(4)))
    assert luks_iso(gens, string("aabb"), string("aaab")).is_empty()


def test_full_symmetric_group_string_iso():
    gens = symmetric_gens(5)
    assert_matches_brute(gens, string("aabba"), string("ababa"))
    assert_matches_brute(gens, string("aabba"), string("aabbb"))


def test_cyclic_group_necklaces():
    gens = GenSet(6, (perm(6, (0, 1, 2, 3, 4, 5)),))
    assert_matches_brute(gens, string("aabaab"), string("abaaba"))
    assert_matches_brute(gens, string("aababb"), string("ababab"))


def test_intransitive_chain_rule():
    # two orbits {0,1,2} and {3,4}
    gens = GenSet(5, (perm(5, (0, 1, 2)), perm(5, (3, 4))))
    assert_matches_brute(gens, string("abcde"), string("bcade"))
    assert_matches_brute(gens, string("aabcc"), string("aabcc"))
    assert_matches_brute(gens, string("abacc"), string("aabcc"))


def test_imprimitive_wreath_product():
    # C2 wr C2 on four points: swap inside blocks, swap the blocks
    gens = GenSet(
        4, (perm(4, (0, 1)), perm(4, (2, 3)), perm(4, (0, 2), (1, 3)))
    )
    assert_matches_brute(gens, string("abab"), string("baba"))
    assert_matches_brute(gens, string("abba"), string("abab"))
    assert_matches_brute(gens, string("aabb"), string("bbaa"))


def test_iterated_wreath_degree_eight():
    gens = GenSet(
        8,
        (
            perm(8, (0, 1)),
            perm(8, (0, 2), (1, 3)),
            perm(8, (0, 4), (1, 5), (2, 6), (3, 7)),
        ),
    )
    assert group_order(gens) == 128
    rng = random.Random(11)
    for _ in range(12):
        letters = [rng.randrange(2) for _ in range(8)]
        x = ColoredString(tuple(letters), 2)
        y = x.permuted(enumerate_elements(gens)[rng.randrange(128)])
        assert_matches_brute(gens, x, y)
        z = ColoredString(tuple(rng.randrange(2) for _ in range(8)), 2)
        assert_matches_brute(gens, x, z)


def test_random_small_groups_match_brute_force():
    rng = random.Random(202)
    for trial in range(40):
        n = rng.randrange(4, 8)
        gens = []
        for _ in range(2):
            images = list(range(n))
            rng.shuffle(images)
            gens.append(Permutation(tuple(images)))
        gs = GenSet(n, tuple(gens))
        if group_order(gs) > 20000:
            continue
        alphabet = rng.randrange(2, 4)
        x = ColoredString(tuple(rng.randrange(alphabet) for _ in range(n)), alphabet)
        if trial % 2:
            y = x.permuted(rng.choice(enumerate_elements(gs)))
        else:
            y = ColoredString(
                tuple(rng.randrange(alphabet) for _ in range(n)), alphabet
            )
        assert_matches_brute(gs, x, y)


def test_automorphism_group_of_fixed_string():
    gens = symmetric_gens(6)
    x = string("aabbcc")
    result = luks_iso(gens, x, x)
    assert result.order() == 8
    assert sorted(result.elements()) == brute_iso(gens, x, x)


# ---------------------------------------------------------------------------
# windows


class TestIsoWindow:
    def test_empty_window_returns_input(self):
        coset = IsoCoset.of(symmetric_gens(4), Permutation.identity(4))
        assert iso_window(coset, string("abcd"), string("abcd"), []) is coset

    def test_rejects_non_invariant_window(self):
        coset = IsoCoset.of(symmetric_gens(4), Permutation.identity(4))
        with pytest.raises(StringError):
            iso_window(coset, string("abcd"), string("abcd"), [0, 1])

    def test_window_fold_equals_full_solve(self):
        gens = GenSet(6, (perm(6, (0, 1, 2)), perm(6, (3, 4)), perm(6, (4, 5))))
        rng = random.Random(7)
        for _ in range(10):
            x = ColoredString(tuple(rng.randrange(2) for _ in range(6)), 2)
            y = ColoredString(tuple(rng.randrange(2) for _ in range(6)), 2)
            whole = luks_iso(gens, x, y)
            folded = IsoCoset.of(gens, Permutation.identity(6))
            for window in ([0, 1, 2], [3, 4, 5]):
                folded = iso_window(folded, x, y, window)
                if folded.is_empty():
                    break
            assert sorted(folded.elements()) == sorted(whole.elements())

    def test_window_on_shifted_coset(self):
        gens = GenSet(4, (perm(4, (0, 1)),))
        sigma = perm(4, (2, 3))
        coset = IsoCoset.of(gens, sigma)
        x, y = string("abcd"), string("abdc")
        out = iso_window(coset, x, y, [2, 3])
        assert sorted(out.elements()) == [
            g for g in coset.elements() if x.permuted(g).letters[2:] == y.letters[2:]
        ]


# ---------------------------------------------------------------------------
# budgets


def test_node_cap_trips():
    gens = GenSet(6, (perm(6, (0, 1, 2)), perm(6, (3, 4)), perm(6, (4, 5))))
    budget = RecursionBudget(node_cap=1)
    with pytest.raises(ResourceLimitExceeded):
        luks_iso(gens, string("ababab"), string("bababa"), budget=budget)


def test_enumeration_cap_trips():
    budget = RecursionBudget(enum_cap=50)
    with pytest.raises(ResourceLimitExceeded):
        luks_iso(symmetric_gens(5), string("abcde"), string("abced"), budget=budget)


# ---------------------------------------------------------------------------
# letter-class alignment


class TestAlignment:
    def test_plain_alignment_is_least_images_first(self):
        g = align_letter_classes(string("abab"), string("aabb"), False)
        assert g is not None
        assert string("abab").permuted(g) == string("aabb")

    def test_count_mismatch_gives_none(self):
        assert align_letter_classes(string("aab"), string("abb"), False) is None

    def test_parity_fix_uses_a_repeated_letter(self):
        g = align_letter_classes(string("aab"), string("aba"), True)
        assert g is not None
        assert g.parity() == 0
        assert string("aab").permuted(g) == string("aba")

    def test_all_distinct_odd_alignment_has_no_even_fix(self):
        assert align_letter_classes(string("abc"), string("bac"), True) is None

    def test_natural_action_matches_brute_force(self):
        rng = random.Random(5)
        for n, has_odd in [(5, True), (5, False), (6, True), (6, False)]:
            gens = symmetric_gens(n) if has_odd else alternating_gens(n)
            for _ in range(6):
                x = ColoredString(tuple(rng.randrange(3) for _ in range(n)), 3)
                y = ColoredString(tuple(rng.randrange(3) for _ in range(n)), 3)
                got = natural_action_iso(x, y, has_odd)
                expect = brute_iso(gens, x, y)
                assert sorted(got.elements()) == expect

    def test_alternating_parity_obstruction(self):
        # distinct letters, odd target: no even permutation works
        x, y = string("abc"), string("bac")
        assert natural_action_iso(x, y, has_odd=False).is_empty()
        assert not natural_action_iso(x, y, has_odd=True).is_empty()


# ---------------------------------------------------------------------------
# files


def test_string_file_round_trip():
    x = ColoredString((0, 2, 1, 1), 3)
    assert parse_string_file(format_string_file(x)) == x


def test_string_file_comments_and_layout():
    x = parse_string_file("# header\n4 3\n0 2\n1 1  # tail\n")
    assert x == ColoredString((0, 2, 1, 1), 3)


def test_string_file_rejects_wrong_count():
    with pytest.raises(StringError):
        parse_string_file("3 2\n0 1\n")
    with pytest.raises(StringError):
        parse_string_file("2 2\n0 1 0\n")

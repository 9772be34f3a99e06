"""Strings under permutation group action, and isomorphism cosets.

A colored string assigns a letter to every point of the domain.  The group
acts on positions: ``(x ** g)`` has at position ``r ** g`` the letter x had
at r.  The isomorphisms from x to y inside a group G form either the empty
set or a right coset Aut_G(x) * rep, which is how every answer here is
represented.

The recursive engine follows the classic orbit / block decomposition: split
along orbits (processing one window at a time), descend to the block kernel
along its coset representatives on a transitive domain, and enumerate
elements once the acting group is small enough.  Windowed subproblems are
solved by restricting the action to the window and pulling the answer back
through the restriction homomorphism, so the recursion always sees
full-domain problems.

The full solver with the large-quotient reductions lives at the bottom of
this module; the pure engine is exposed separately because the degradation
tests pin its behavior on small groups against brute force.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from .errors import InternalInconsistency, ResourceLimitExceeded
from .perm import (
    GenSet,
    GroupError,
    Homomorphism,
    Permutation,
    alternating_gens,
    block_action,
    minimal_block_system,
    orbits,
    pruned_gens,
    restriction_hom,
    schreier_sims,
    subgroup_by_test,
)
from .relstruct import RelStructure, f1_refine
from .schemes import SchemeError, classify_classical, identify_alt_action
from .soj import SplitError, design_lemma, split_or_johnson
from .wl import wl


class StringError(ValueError):
    """Bad string input: length or alphabet mismatch, letter out of range,
    or a window the acting group does not preserve."""


# ---------------------------------------------------------------------------
# strings


@dataclass(frozen=True)
class ColoredString:
    """Letters 0..alphabet_size-1 assigned to points 0..n-1."""

    letters: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self) -> None:
        for letter in self.letters:
            if not 0 <= letter < self.alphabet_size:
                raise StringError(
                    f"letter {letter} outside alphabet of size {self.alphabet_size}"
                )

    @property
    def n(self) -> int:
        return len(self.letters)

    def permuted(self, g: Permutation) -> "ColoredString":
        """x ** g: position r ** g receives the letter x had at r."""
        if g.degree != self.n:
            raise StringError("permutation degree differs from string length")
        out = [0] * self.n
        for r, letter in enumerate(self.letters):
            out[g.images[r]] = letter
        return ColoredString(tuple(out), self.alphabet_size)

    def restricted(self, window: Sequence[int]) -> "ColoredString":
        return ColoredString(
            tuple(self.letters[p] for p in sorted(window)), self.alphabet_size
        )

    def letter_counts(self) -> tuple[int, ...]:
        counts = [0] * self.alphabet_size
        for letter in self.letters:
            counts[letter] += 1
        return tuple(counts)


def make_window(points: Iterable[int]) -> tuple[int, ...]:
    """Windows are kept sorted and duplicate-free."""
    return tuple(sorted(set(points)))


# ---------------------------------------------------------------------------
# isomorphism cosets


@dataclass(frozen=True)
class IsoCoset:
    """Either empty or the right coset <aut_gens> * rep.

    ``aut_gens`` generate the automorphism group on the left; ``rep`` is one
    isomorphism.  The empty answer is the shared EMPTY sentinel below.
    """

    aut_gens: Optional[GenSet]
    rep: Optional[Permutation]

    @classmethod
    def empty(cls) -> "IsoCoset":
        return _EMPTY

    @classmethod
    def of(cls, aut_gens: GenSet, rep: Permutation) -> "IsoCoset":
        if rep.degree != aut_gens.degree:
            raise StringError("coset parts disagree on degree")
        return cls(aut_gens, rep)

    @classmethod
    def identity_coset(cls, degree: int) -> "IsoCoset":
        return cls(GenSet.trivial(degree), Permutation.identity(degree))

    def is_empty(self) -> bool:
        return self.aut_gens is None

    @property
    def degree(self) -> int:
        if self.is_empty():
            raise StringError("the empty coset has no degree")
        return self.rep.degree

    def order(self) -> int:
        if self.is_empty():
            return 0
        return schreier_sims(self.aut_gens).order

    def contains(self, g: Permutation) -> bool:
        if self.is_empty():
            return False
        return schreier_sims(self.aut_gens).contains(g * self.rep.inverse())

    def elements(self, cap: Optional[int] = None) -> list[Permutation]:
        if self.is_empty():
            return []
        chain = schreier_sims(self.aut_gens)
        return sorted(a * self.rep for a in chain.elements(cap))


_EMPTY = IsoCoset(None, None)


def coset_shift(coset: IsoCoset, sigma: Permutation) -> IsoCoset:
    """Right-translate: (A * rep) * sigma.  Solving against a shifted target
    uses Iso over K*sigma == Iso over K against y shifted back, then this."""
    if coset.is_empty():
        return coset
    return IsoCoset.of(coset.aut_gens, coset.rep * sigma)


def coset_union(cosets: Sequence[IsoCoset]) -> IsoCoset:
    """Union of cosets that share one automorphism group on the left.

    The base piece is the one with the lexicographically least
    representative; every other piece contributes rep_i * rep_base^{-1} as a
    new generator.  Pieces with mismatched automorphism groups mean the
    caller broke the recursion contract: detected by sifting, loudly.
    """
    alive = [c for c in cosets if not c.is_empty()]
    if not alive:
        return IsoCoset.empty()
    alive.sort(key=lambda c: c.rep.images)
    base = alive[0]
    base_chain = schreier_sims(base.aut_gens)
    extra: list[Permutation] = []
    for other in alive[1:]:
        if other.aut_gens != base.aut_gens:
            other_chain = schreier_sims(other.aut_gens)
            if other_chain.order != base_chain.order or not all(
                base_chain.contains(g) for g in other.aut_gens
            ):
                raise InternalInconsistency(
                    "coset union over differing automorphism groups"
                )
        diff = other.rep * base.rep.inverse()
        if not base_chain.contains(diff):
            extra.append(diff)
    if not extra:
        return base
    merged = GenSet(base.degree, tuple(base.aut_gens.gens) + tuple(extra))
    return IsoCoset.of(pruned_gens(merged), base.rep)


# ---------------------------------------------------------------------------
# budgets


@dataclass
class RecursionBudget:
    """Counters threaded through the recursion.

    ``node_counter`` increments at every solver node and trips the cap;
    ``coset_multiplier`` multiplies up the branch counts taken at choice
    points; ``stabilized_points`` records points whose stabilization the
    answer is conditioned on (always re-unioned away before returning).
    """

    node_cap: Optional[int] = 500_000
    depth_cap: int = 400
    enum_cap: int = 10**6
    depth: int = 0
    node_counter: int = 0
    coset_multiplier: int = 1
    stabilized_points: tuple[int, ...] = ()

    def bump(self) -> None:
        self.node_counter += 1
        if self.node_cap is not None and self.node_counter > self.node_cap:
            raise ResourceLimitExceeded(
                f"solver node cap {self.node_cap} exceeded"
            )

    def deeper(self) -> "RecursionBudget":
        if self.depth + 1 > self.depth_cap:
            raise ResourceLimitExceeded(f"recursion depth cap {self.depth_cap}")
        child = replace(self, depth=self.depth + 1)
        # share the node counter by write-back; python ints are immutable,
        # so the parent re-reads after the child returns
        return child

    def absorb(self, child: "RecursionBudget") -> None:
        self.node_counter = child.node_counter
        self.coset_multiplier = max(self.coset_multiplier, child.coset_multiplier)


@dataclass(frozen=True)
class SolverConfig:
    """Dispatch thresholds for the full solver.

    ``small_quotient_c`` scales the log-size bound below which a primitive
    quotient is preferably enumerated; ``enum_cap`` is the hard coset count
    cap; caps beyond it abort with a resource error rather than guessing.
    ``giant_quotients`` turns the alternating-quotient reductions off
    entirely, leaving the pure recursive engine; the answers must agree,
    only the reachable problem sizes shrink.
    """

    small_quotient_c: float = 10.0
    enum_cap: int = 10**6
    node_cap: Optional[int] = 500_000
    depth_cap: int = 400
    giant_quotients: bool = True

    def budget(self) -> RecursionBudget:
        return RecursionBudget(
            node_cap=self.node_cap, depth_cap=self.depth_cap, enum_cap=self.enum_cap
        )


def small_quotient_bound(n: int) -> int:
    """Letter domains of size m at or below this count as small."""
    return max(8, math.ceil(2 + math.log2(max(n, 2))))


# ---------------------------------------------------------------------------
# the recursive engine

Recurse = Callable[[GenSet, ColoredString, ColoredString, RecursionBudget], IsoCoset]


def _direct_check(x: ColoredString, y: ColoredString) -> IsoCoset:
    if x.letters == y.letters:
        return IsoCoset.identity_coset(x.n)
    return IsoCoset.empty()


def _enumerate_case(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
) -> IsoCoset:
    """Search every group element; exact and final.  Only reached when the
    group order is under the enumeration cap.

    The search walks the stabilizer chain transversals and prunes any branch
    whose settled base-point image already breaks a letter constraint, so
    letter-rich strings cost far less than the group order suggests."""
    chain = schreier_sims(gens)
    if chain.order > budget.enum_cap:
        raise ResourceLimitExceeded(
            f"enumeration of {chain.order} elements exceeds cap {budget.enum_cap}"
        )
    if x.letters == y.letters and len(set(x.letters)) == 1:
        return IsoCoset.of(gens, Permutation.identity(x.n))
    xl, yl = x.letters, y.letters
    matches: list[tuple[int, ...]] = []
    for g in chain.filtered_elements(lambda p, im: xl[p] == yl[im]):
        img = g.images
        if all(xl[i] == yl[gi] for i, gi in enumerate(img)):
            matches.append(img)
    if not matches:
        return IsoCoset.empty()
    matches.sort()
    rep = Permutation(matches[0])
    rep_inv = rep.inverse()
    aut = [Permutation(m) * rep_inv for m in matches[1:]]
    group = pruned_gens(GenSet(x.n, tuple(aut))) if aut else GenSet.trivial(x.n)
    return IsoCoset.of(group, rep)


def iso_window(
    coset: IsoCoset,
    x: ColoredString,
    y: ColoredString,
    window: Sequence[int],
    recurse: Optional[Recurse] = None,
    budget: Optional[RecursionBudget] = None,
) -> IsoCoset:
    """Refine a candidate coset by the window constraint
    ``x(p) == y(p ** tau)`` for every window point p.

    The window must be invariant under the coset's automorphism group.
    Empty window: unchanged.  Full window: the whole problem.
    """
    win = make_window(window)
    if coset.is_empty() or not win:
        return coset
    gens, rep = coset.aut_gens, coset.rep
    winset = set(win)
    for g in gens:
        if {g.images[p] for p in win} != winset:
            raise StringError("window is not invariant under the coset group")
    if recurse is None:
        recurse = _engine
    if budget is None:
        budget = RecursionBudget()
    # shift the representative away: constraints against y become
    # constraints against y shifted back
    y_back = y.permuted(rep.inverse())
    if len(win) == x.n:
        inner = recurse(gens, x, y_back, budget)
        return coset_shift(inner, rep)
    phi = restriction_hom(gens, win)
    sub = recurse(
        phi.image_gens(), x.restricted(win), y_back.restricted(win), budget
    )
    if sub.is_empty():
        return IsoCoset.empty()
    lifted_gens = tuple(phi.kernel_gens().gens) + tuple(
        phi.lift(a) for a in sub.aut_gens
    )
    lifted_rep = phi.lift(sub.rep)
    pulled = IsoCoset.of(
        pruned_gens(GenSet(gens.degree, lifted_gens)), lifted_rep
    )
    return coset_shift(pulled, rep)


def _engine(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
) -> IsoCoset:
    """Pure orbit/block/enumerate recursion; no structural identifications."""
    budget.bump()
    if x.n != y.n or x.alphabet_size != y.alphabet_size:
        raise StringError("strings live on different domains")
    if x.n != gens.degree:
        raise StringError("string length differs from group degree")
    if x.letter_counts() != y.letter_counts():
        return IsoCoset.empty()
    if not gens.gens or all(g.is_identity() for g in gens):
        return _direct_check(x, y)
    cells = orbits(gens)
    if len(cells) > 1:
        current = IsoCoset.of(gens, Permutation.identity(gens.degree))
        for cell in cells:
            current = iso_window(current, x, y, cell, _engine, budget)
            if current.is_empty():
                return current
        return current
    # transitive: descend to the block kernel along its coset representatives
    system = minimal_block_system(gens)
    if system is None:
        return _enumerate_case(gens, x, y, budget)
    induced, _ = block_action(gens, system)
    phi = Homomorphism(gens, induced.gens, len(system.blocks))
    kernel = pruned_gens(phi.kernel_gens())
    reps = phi.kernel_coset_reps(cap=budget.enum_cap)
    child = budget.deeper()
    branches = []
    for sigma in reps:
        shifted_back = y.permuted(sigma.inverse())
        piece = _engine(kernel, x, shifted_back, child)
        branches.append(coset_shift(piece, sigma))
    budget.absorb(child)
    return coset_union(branches)


def luks_iso(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    factor_bound: Optional[int] = None,
    budget: Optional[RecursionBudget] = None,
) -> IsoCoset:
    """Isomorphisms of x onto y inside <gens>, by pure recursive descent.

    ``factor_bound`` is a promise about the group's composition factors, not
    a checked input; breaking it only costs running time because primitive
    quotients are enumerated outright.  Output is verified before return.
    """
    if budget is None:
        budget = RecursionBudget()
    result = _engine(pruned_gens(gens), x, y, budget)
    _verify_coset(gens, x, y, result)
    return result


def _verify_coset(
    gens: GenSet, x: ColoredString, y: ColoredString, result: IsoCoset
) -> None:
    """Soundness: the representative maps x to y, the generators fix x, and
    everything lies in the ambient group.  Raised failures are bugs."""
    if result.is_empty():
        return
    if x.permuted(result.rep) != y:
        raise InternalInconsistency("representative does not map x to y")
    for a in result.aut_gens:
        if x.permuted(a) != x:
            raise InternalInconsistency("claimed automorphism moves x")
    ambient = schreier_sims(gens)
    if not ambient.contains(result.rep):
        raise InternalInconsistency("representative escapes the group")
    for a in result.aut_gens:
        if not ambient.contains(a):
            raise InternalInconsistency("automorphism escapes the group")


# ---------------------------------------------------------------------------
# letter-class alignment (the natural-action base case)


def align_letter_classes(
    x: ColoredString, y: ColoredString, require_even: bool
) -> Optional[Permutation]:
    """A letter-preserving position bijection taking x to y, least images
    first; with ``require_even`` the result is adjusted to an even
    permutation by swapping inside a letter class, or None if parity cannot
    be fixed."""
    if x.letter_counts() != y.letter_counts():
        return None
    positions_y: dict[int, list[int]] = {}
    for p, letter in enumerate(y.letters):
        positions_y.setdefault(letter, []).append(p)
    images = [0] * x.n
    taken = {letter: 0 for letter in positions_y}
    for p, letter in enumerate(x.letters):
        images[p] = positions_y[letter][taken[letter]]
        taken[letter] += 1
    result = Permutation(tuple(images))
    if not require_even or result.parity() == 0:
        return result
    for letter, pos in positions_y.items():
        if len(pos) >= 2:
            swapped = list(images)
            a = images.index(pos[0])
            b = images.index(pos[1])
            swapped[a], swapped[b] = swapped[b], swapped[a]
            return Permutation(tuple(swapped))
    return None


def natural_action_iso(
    x: ColoredString, y: ColoredString, has_odd: bool
) -> IsoCoset:
    """Iso under the full symmetric group (``has_odd``) or its even
    subgroup: letter classes align positionally, automorphisms are the
    class-preserving permutations, parity-filtered when required."""
    rep = align_letter_classes(x, y, require_even=not has_odd)
    if rep is None:
        return IsoCoset.empty()
    classes: dict[int, list[int]] = {}
    for p, letter in enumerate(x.letters):
        classes.setdefault(letter, []).append(p)
    young: list[Permutation] = []
    for members in classes.values():
        for a, b in zip(members, members[1:]):
            images = list(range(x.n))
            images[a], images[b] = b, a
            young.append(Permutation(tuple(images)))
    aut = GenSet(x.n, tuple(young))
    if not has_odd and young:
        aut = subgroup_by_test(aut, lambda p: p.parity() == 0, index_bound=2)
    return IsoCoset.of(aut, rep)


# ---------------------------------------------------------------------------
# file format


def parse_string_file(text: str) -> ColoredString:
    """String file: "n alphabet" on the first relevant line, then n letters
    (nonnegative integers below the alphabet size); '#' starts a comment."""
    tokens: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        tokens.extend(line.split())
    if len(tokens) < 2:
        raise StringError("string file needs a header")
    n, alphabet = int(tokens[0]), int(tokens[1])
    letters = tuple(int(t) for t in tokens[2 : 2 + n])
    if len(letters) != n or len(tokens) != 2 + n:
        raise StringError(f"expected exactly {n} letters")
    return ColoredString(letters, alphabet)


def format_string_file(x: ColoredString) -> str:
    return f"{x.n} {x.alphabet_size}\n" + " ".join(str(c) for c in x.letters) + "\n"


# ---------------------------------------------------------------------------
# the full solver: alternating quotient reductions
#
# A transitive group whose primitive quotient is too large to enumerate is
# useless to the pure engine.  The reductions below recognize the quotient
# as Alt_m or Sym_m moving k-subsets of an ideal m-point domain, read the
# string as a structure on those m points, and cut the quotient down along
# canonical features of that structure.  Every cut is a union of cosets of
# a proper subgroup, so correctness never depends on which feature was
# picked, only on sweeping each choice completely.


@dataclass(frozen=True)
class GiantQuotient:
    """A quotient action recognized as Alt_m or Sym_m moving k-subsets.

    ``hom`` maps the acting group onto the m-point domain; ``point_to_set``
    names each quotient point by the k-subset it stands for.  ``has_odd``
    records whether some image is odd, making the image the full symmetric
    group rather than the alternating one.
    """

    m: int
    k: int
    hom: Homomorphism
    point_to_set: tuple[frozenset, ...]
    has_odd: bool


def _subset_parameters(r: int) -> list[tuple[int, int]]:
    """All (m, k) with C(m, k) == r and 2k < m, the natural action first."""
    out: list[tuple[int, int]] = []
    if r >= 3:
        out.append((r, 1))
    k = 2
    while math.comb(2 * k + 1, k) <= r:
        m = 2 * k + 1
        while math.comb(m, k) < r:
            m += 1
        if math.comb(m, k) == r:
            out.append((m, k))
        k += 1
    return out


@lru_cache(maxsize=256)
def _giant_quotient(source: GenSet, quot: GenSet) -> Optional[GiantQuotient]:
    """Recognize the quotient as a subset action of Sym(m) or Alt(m) and
    return the composite homomorphism from the source group; None when
    nothing checks out.

    Identification only proposes a labeling; the decisive test is that both
    alternating generators of the labeled domain sift through the image.
    Cached: the recognition is pure and the homomorphism carries chains
    worth keeping warm across solves over the same group.
    """
    for m, k in _subset_parameters(quot.degree):
        try:
            aid = identify_alt_action(quot, m, k)
        except SchemeError:
            continue
        chain = schreier_sims(GenSet(m, aid.generator_images))
        if not all(chain.contains(a) for a in alternating_gens(m)):
            continue
        hom = Homomorphism(source, aid.generator_images, m)
        has_odd = any(g.parity() == 1 for g in aid.generator_images)
        return GiantQuotient(m, k, hom, aid.point_to_set, has_odd)
    return None


def _swapped_set(s: frozenset, a: int, b: int) -> frozenset:
    ina, inb = a in s, b in s
    if ina == inb:
        return s
    if ina:
        return (s - {a}) | {b}
    return (s - {b}) | {a}


def _branch_union(pieces: Sequence[IsoCoset]) -> IsoCoset:
    """Union of cosets of possibly different subgroups of one automorphism
    group.  Valid exactly when the union is itself a full iso coset: each
    piece's generators fix x, and differences of representatives are then
    automorphisms, so together they generate the full group."""
    alive = [c for c in pieces if not c.is_empty()]
    if not alive:
        return IsoCoset.empty()
    alive.sort(key=lambda c: c.rep.images)
    base = alive[0]
    collected: list[Permutation] = []
    for c in alive:
        collected.extend(c.aut_gens.gens)
        if c is not base:
            collected.append(c.rep * base.rep.inverse())
    merged = tuple(dict.fromkeys(g for g in collected if not g.is_identity()))
    if not merged:
        return IsoCoset.of(GenSet.trivial(base.degree), base.rep)
    return IsoCoset.of(pruned_gens(GenSet(base.degree, merged)), base.rep)


def _window_syms(members: Sequence[int], degree: int) -> list[Permutation]:
    """Adjacent transpositions inside one class, as degree-wide maps."""
    out = []
    ms = sorted(members)
    for a, b in zip(ms, ms[1:]):
        images = list(range(degree))
        images[a], images[b] = b, a
        out.append(Permutation(tuple(images)))
    return out


def _even_coset_rep(
    sigma0: Permutation, target_gens: Sequence[Permutation], has_odd: bool
) -> Optional[Permutation]:
    """A representative of <target> * sigma0 lying in the quotient image:
    sigma0 itself unless the image is alternating and sigma0 is odd, in
    which case an odd target generator repairs the parity.  None means the
    whole coset misses the image."""
    if has_odd or sigma0.parity() == 0:
        return sigma0
    for h in target_gens:
        if h.parity() == 1:
            return h * sigma0
    return None


def _even_subgroup(target: GenSet) -> GenSet:
    if all(h.parity() == 0 for h in target):
        return target
    return subgroup_by_test(
        target,
        lambda p: p.parity() == 0,
        index_bound=2,
        key_fn=lambda p: p.parity(),
    )


def _image_branch(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    target_gens: Sequence[Permutation],
    sigma0: Permutation,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Descend to the candidates whose quotient image lies in
    <target> * sigma0: solve over the preimage subgroup against the target
    shifted back by a lift of the representative.

    The even representative together with the even subgroup of the target
    reproduce exactly the image cosets meeting an alternating image, so
    nothing is lost when odd images are unavailable.
    """
    m = hom.image_degree
    target = GenSet(m, tuple(target_gens))
    sigma = _even_coset_rep(sigma0, target.gens, has_odd)
    if sigma is None:
        return IsoCoset.empty()
    if not has_odd:
        target = _even_subgroup(target)
    sub = pruned_gens(hom.preimage_of_subgroup(target))
    g0 = hom.lift(sigma)
    child = budget.deeper()
    piece = _solve(sub, x, y.permuted(g0.inverse()), child, cfg)
    budget.absorb(child)
    return coset_shift(piece, g0)


def _point_branch(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    points: Sequence[int],
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
    pool: Optional[Sequence[int]] = None,
) -> IsoCoset:
    """Partition the candidates by where the quotient sends the given
    points; every assignment from ``pool`` is one branch.  Which points
    were picked only steers efficiency; completeness of the sweep is what
    carries correctness."""
    m = hom.image_degree
    pts = tuple(dict.fromkeys(points))
    targets = tuple(range(m)) if pool is None else tuple(pool)
    spare = [v for v in range(m) if v not in set(pts)]
    # The branch coset is target * sigma0, so the target stabilizes the
    # source-side structure: here, the chosen points held fixed.
    target = _window_syms(spare, m)
    child = budget.deeper()
    branches = []
    for q in itertools.permutations(targets, len(pts)):
        rest = [v for v in range(m) if v not in set(q)]
        images = [0] * m
        for p, t in zip(pts, q):
            images[p] = t
        for p, t in zip(spare, rest):
            images[p] = t
        sigma0 = Permutation(tuple(images))
        piece = _image_branch(gens, hom, has_odd, target, sigma0, x, y, child, cfg)
        branches.append(piece)
    budget.absorb(child)
    return _branch_union(branches)


def _coloring_branch(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    colors_x: Sequence[int],
    colors_y: Sequence[int],
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Branch on a canonical quotient coloring computed for each side in a
    shared palette: class profiles must agree exactly, the representative
    aligns classes least first, and candidates preserve every class."""
    m = hom.image_degree
    by_x: dict[int, list[int]] = {}
    by_y: dict[int, list[int]] = {}
    for v in range(m):
        by_x.setdefault(colors_x[v], []).append(v)
        by_y.setdefault(colors_y[v], []).append(v)
    if set(by_x) != set(by_y):
        return IsoCoset.empty()
    if any(len(by_x[c]) != len(by_y[c]) for c in by_x):
        return IsoCoset.empty()
    if len(by_x) < 2:
        raise InternalInconsistency("a branching coloring must split the domain")
    images = [0] * m
    target: list[Permutation] = []
    for c in sorted(by_x):
        for a, b in zip(by_x[c], by_y[c]):
            images[a] = b
        target.extend(_window_syms(by_x[c], m))
    sigma0 = Permutation(tuple(images))
    return _image_branch(gens, hom, has_odd, target, sigma0, x, y, budget, cfg)


def _groups_branch(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    groups_x: Sequence[tuple],
    groups_y: Sequence[tuple],
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Branch on a canonical partition refinement: ``groups`` lists
    (key, members, parts or None) with shared canonical keys; parts within
    a group have one common size and may be permuted among themselves, so
    the pairing across sides inside a group is free."""
    m = hom.image_degree
    gx = sorted(groups_x, key=lambda g: g[0])
    gy = sorted(groups_y, key=lambda g: g[0])
    if [g[0] for g in gx] != [g[0] for g in gy]:
        return IsoCoset.empty()
    images = [0] * m
    target: list[Permutation] = []
    nontrivial = False
    for (_, mem_x, parts_x), (_, mem_y, parts_y) in zip(gx, gy):
        if len(mem_x) != len(mem_y) or (parts_x is None) != (parts_y is None):
            return IsoCoset.empty()
        if parts_x is None:
            for a, b in zip(sorted(mem_x), sorted(mem_y)):
                images[a] = b
            target.extend(_window_syms(mem_x, m))
            if len(mem_x) < m:
                nontrivial = True
            continue
        px = sorted(tuple(sorted(p)) for p in parts_x)
        py = sorted(tuple(sorted(p)) for p in parts_y)
        if sorted(map(len, px)) != sorted(map(len, py)):
            return IsoCoset.empty()
        if len({len(p) for p in px}) != 1:
            raise InternalInconsistency("parts within a group must share a size")
        nontrivial = True
        for part_a, part_b in zip(px, py):
            for a, b in zip(part_a, part_b):
                images[a] = b
            target.extend(_window_syms(part_a, m))
        for part_a, part_b in zip(px, px[1:]):
            swap = list(range(m))
            for a, b in zip(part_a, part_b):
                swap[a], swap[b] = b, a
            target.append(Permutation(tuple(swap)))
    if not nontrivial:
        raise InternalInconsistency("a branching partition must be proper")
    sigma0 = Permutation(tuple(images))
    return _image_branch(gens, hom, has_odd, target, sigma0, x, y, budget, cfg)


def _johnson_branch(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    jx,
    jy,
    dom_x: Sequence[int],
    dom_y: Sequence[int],
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Branch on whole-class subset-scheme identifications: both sides name
    their class by the s-subsets of a small label set, the families are
    complete, so corresponding labels align the classes directly and the
    candidates act through label permutations."""
    if (jx.m, jx.s) != (jy.m, jy.s):
        return IsoCoset.empty()
    if jx.s < 2:
        raise InternalInconsistency("a subset scheme on singletons is no reduction")
    m = hom.image_degree
    map_x = {jx.point_to_set[i]: dom_x[i] for i in range(len(dom_x))}
    map_y = {jy.point_to_set[i]: dom_y[i] for i in range(len(dom_y))}
    if len(map_x) != len(dom_x) or set(map_x) != set(map_y):
        raise InternalInconsistency("subset families must be complete")
    images = [0] * m
    for s, v in map_x.items():
        images[v] = map_y[s]
    rest_x = sorted(set(range(m)) - set(dom_x))
    rest_y = sorted(set(range(m)) - set(dom_y))
    for a, b in zip(rest_x, rest_y):
        images[a] = b
    target: list[Permutation] = []
    for i in range(jx.m - 1):
        induced_images = list(range(m))
        for s, v in map_x.items():
            induced_images[v] = map_x[_swapped_set(s, i, i + 1)]
        target.append(Permutation(tuple(induced_images)))
    target.extend(_window_syms(rest_x, m))
    sigma0 = Permutation(tuple(images))
    return _image_branch(gens, hom, has_odd, target, sigma0, x, y, budget, cfg)


# -- reading the string as a structure on the ideal domain ------------------


def _subset_letter_structure(
    x: ColoredString, iota: Sequence[frozenset], m: int, k: int
) -> RelStructure:
    """Every ordering of a named k-subset carries the letter of its
    position, one relation per letter."""
    rels: list[set[tuple[int, ...]]] = [set() for _ in range(x.alphabet_size)]
    for p, s in enumerate(iota):
        for t in itertools.permutations(sorted(s)):
            rels[x.letters[p]].add(t)
    return RelStructure(m, k, tuple(frozenset(r) for r in rels))


def _ideal_twins(
    x: ColoredString, iota: Sequence[frozenset], pos_of: dict, m: int
) -> list[list[int]]:
    """Classes of ideal points whose transpositions fix the string."""
    parent = list(range(m))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(m):
        for b in range(a + 1, m):
            if find(a) == find(b):
                continue
            if all(
                x.letters[p] == x.letters[pos_of[_swapped_set(s, a, b)]]
                for p, s in enumerate(iota)
            ):
                parent[find(a)] = find(b)
    classes: dict[int, list[int]] = {}
    for v in range(m):
        classes.setdefault(find(v), []).append(v)
    return sorted(classes.values())


def _refine_by_diagonal(
    base: Sequence[int], dom: Sequence[int], closure
) -> tuple[int, ...]:
    """Refine a quotient coloring by the diagonal colors a closed pair
    coloring assigns inside one class; palettes stay shared because the
    keys are, and the reindexing is by sorted key."""
    index = {v: i for i, v in enumerate(dom)}
    keys = []
    for v in range(len(base)):
        if v in index:
            keys.append((1, base[v], closure.color((index[v], index[v]))))
        else:
            keys.append((0, base[v], -1))
    order = {key: i for i, key in enumerate(sorted(set(keys)))}
    return tuple(order[key] for key in keys)


def _disconnected_parts(summary, dom: Sequence[int]) -> tuple[int, tuple]:
    """The least disconnected color graph's components, mapped back to
    quotient points; the split is canonical because the color is."""
    for cg in summary.color_graphs:
        if not cg.connected:
            parts = sorted(
                tuple(sorted(dom[i] for i in comp)) for comp in cg.components
            )
            return cg.color, tuple(parts)
    raise InternalInconsistency("an imprimitive coloring must disconnect somewhere")


# -- the primitive reduction ------------------------------------------------


def _giant_primitive(
    gens: GenSet,
    giant: GiantQuotient,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Primitive action recognized as the k-subsets of an ideal domain.

    The natural action is the base case.  Otherwise the letters induce a
    k-ary structure on the ideal points; a dominant twin class, the design
    reduction's coloring, or an identified subscheme each cut the quotient
    to a proper subgroup, and ledgered choices turn into point branches.
    """
    if giant.k == 1:
        return natural_action_iso(x, y, giant.has_odd)
    m, k, hom, has_odd = giant.m, giant.k, giant.hom, giant.has_odd
    iota = giant.point_to_set
    pos_of = {s: p for p, s in enumerate(iota)}
    twins_x = _ideal_twins(x, iota, pos_of, m)
    big_x = max(twins_x, key=len)
    if len(big_x) == m:
        # every transposition of the ideal domain fixes x, hence the whole
        # group does; equality already implies the full coset
        if x == y:
            return IsoCoset.of(gens, Permutation.identity(x.n))
        return IsoCoset.empty()
    if 2 * len(big_x) > m:
        twins_y = _ideal_twins(y, iota, pos_of, m)
        big_y = max(twins_y, key=len)
        if len(big_y) != len(big_x):
            return IsoCoset.empty()
        in_x, in_y = set(big_x), set(big_y)
        return _coloring_branch(
            gens,
            hom,
            has_odd,
            tuple(0 if v in in_x else 1 for v in range(m)),
            tuple(0 if v in in_y else 1 for v in range(m)),
            x,
            y,
            budget,
            cfg,
        )
    closure_x = wl(f1_refine(_subset_letter_structure(x, iota, m, k)))
    return _design_reduction(
        gens,
        hom,
        has_odd,
        closure_x,
        lambda: wl(f1_refine(_subset_letter_structure(y, iota, m, k))),
        x,
        y,
        budget,
        cfg,
        on_x_split=None,
    )


def _design_reduction(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    closure_x,
    closure_y_fn,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
    on_x_split,
) -> IsoCoset:
    """Shared tail of the quotient reductions: run the design split on the
    left closure, turn its ledgered prefix into point branches, otherwise
    demand the same canonical outcome from the right closure and branch on
    the shared coloring or dominant class.

    ``on_x_split`` handles a left-side twin overflow; None means the caller
    already ruled it out, so overflowing is an internal fault.  A
    right-side overflow is always a canonical mismatch.
    """
    try:
        dl_x = design_lemma(closure_x, Fraction(1, 2))
    except SplitError as err:
        if on_x_split is None:
            raise InternalInconsistency(
                f"design reduction rejected a checked precondition: {err}"
            )
        return on_x_split()
    if dl_x.prefix:
        return _point_branch(gens, hom, has_odd, dl_x.prefix, x, y, budget, cfg)
    try:
        dl_y = design_lemma(closure_y_fn(), Fraction(1, 2))
    except SplitError:
        return IsoCoset.empty()
    if dl_y.prefix or dl_y.case != dl_x.case:
        return IsoCoset.empty()
    if dl_x.case == "no_dominant":
        return _coloring_branch(
            gens,
            hom,
            has_odd,
            tuple(dl_x.coloring.colors),
            tuple(dl_y.coloring.colors),
            x,
            y,
            budget,
            cfg,
        )
    return _dominant_reduction(gens, hom, has_odd, dl_x, dl_y, x, y, budget, cfg)


def _dominant_reduction(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    dl_x,
    dl_y,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Both sides expose a dominant class with a nontrivial pair coloring.

    Close the restrictions up: a vertex split refines the coloring, a
    disconnected constituent splits the class into equal parts, and the
    remaining uniprimitive case either identifies a whole subscheme or
    pays for its choices, which become point branches.
    """
    dom_x, dom_y = dl_x.dominant_class, dl_y.dominant_class
    if len(dom_x) != len(dom_y):
        return IsoCoset.empty()
    base_x = tuple(dl_x.coloring.colors)
    base_y = tuple(dl_y.coloring.colors)
    if base_x[dom_x[0]] != base_y[dom_y[0]]:
        return IsoCoset.empty()
    cw_x, cw_y = wl(dl_x.restriction), wl(dl_y.restriction)
    sum_x, sum_y = classify_classical(cw_x), classify_classical(cw_y)
    if not (sum_x.homogeneous and sum_y.homogeneous):
        return _coloring_branch(
            gens,
            hom,
            has_odd,
            _refine_by_diagonal(base_x, dom_x, cw_x),
            _refine_by_diagonal(base_y, dom_y, cw_y),
            x,
            y,
            budget,
            cfg,
        )
    if not (sum_x.primitive and sum_y.primitive):
        if sum_x.primitive != sum_y.primitive:
            return IsoCoset.empty()
        col_x, parts_x = _disconnected_parts(sum_x, dom_x)
        col_y, parts_y = _disconnected_parts(sum_y, dom_y)
        if col_x != col_y:
            return IsoCoset.empty()
        groups_x = _partition_groups(base_x, dom_x, parts_x)
        groups_y = _partition_groups(base_y, dom_y, parts_y)
        return _groups_branch(
            gens, hom, has_odd, groups_x, groups_y, x, y, budget, cfg
        )
    soj_x = split_or_johnson(cw_x, Fraction(2, 3))
    if soj_x.index_cost > 1:
        points = tuple(dom_x[i] for i in soj_x.stabilized)
        return _point_branch(
            gens, hom, has_odd, points, x, y, budget, cfg, pool=tuple(dom_y)
        )
    soj_y = split_or_johnson(cw_y, Fraction(2, 3))
    if soj_y.index_cost > 1 or soj_y.kind != "johnson":
        return IsoCoset.empty()
    return _johnson_branch(
        gens,
        hom,
        has_odd,
        soj_x.johnson,
        soj_y.johnson,
        dom_x,
        dom_y,
        x,
        y,
        budget,
        cfg,
    )


def _partition_groups(
    base: Sequence[int], dom: Sequence[int], parts: tuple
) -> list[tuple]:
    """Partition-branch groups: untouched color classes stay whole, the
    dominant class splits into its parts, grouped by part size so every
    group is equal-sized."""
    dom_set = set(dom)
    dom_color = base[dom[0]]
    groups: list[tuple] = []
    for color in sorted(set(base)):
        members = tuple(v for v in range(len(base)) if base[v] == color)
        if color != dom_color:
            groups.append(((color, 0, 0), members, None))
    by_size: dict[int, list[tuple]] = {}
    for part in parts:
        by_size.setdefault(len(part), []).append(part)
    if sorted(v for ps in parts for v in ps) != sorted(dom_set):
        raise InternalInconsistency("parts must tile the dominant class")
    for size in sorted(by_size):
        chunk = by_size[size]
        members = tuple(sorted(v for part in chunk for v in part))
        groups.append(((dom_color, 1, size), members, tuple(chunk)))
    return groups


# -- the transitive dispatch ------------------------------------------------


def _quotient_descend(
    gens: GenSet,
    system,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Enumerate the primitive quotient: with blocks, branch over the
    kernel's coset representatives; without, enumerate the group."""
    if system is None:
        return _enumerate_case(gens, x, y, budget)
    induced_gens, _ = block_action(gens, system)
    phi = Homomorphism(gens, induced_gens.gens, len(system.blocks))
    kernel = pruned_gens(phi.kernel_gens())
    reps = phi.kernel_coset_reps(cap=budget.enum_cap)
    child = budget.deeper()
    branches = []
    for sigma in reps:
        piece = _solve(kernel, x, y.permuted(sigma.inverse()), child, cfg)
        branches.append(coset_shift(piece, sigma))
    budget.absorb(child)
    return coset_union(branches)


def _solve_transitive(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    n = gens.degree
    system = minimal_block_system(gens)
    if system is None:
        quot, r = gens, n
    else:
        quot, _ = block_action(gens, system)
        r = len(system.blocks)
    h_order = schreier_sims(quot).order
    can_enum = h_order <= budget.enum_cap
    if can_enum and h_order <= r ** (1 + math.log2(max(r, 2))):
        return _quotient_descend(gens, system, x, y, budget, cfg)
    giant = _giant_quotient(gens, quot) if cfg.giant_quotients else None
    small_m = giant is not None and giant.m <= max(
        small_quotient_bound(n),
        int(cfg.small_quotient_c * math.log2(max(n, 2))),
    )
    if can_enum and (giant is None or small_m):
        return _quotient_descend(gens, system, x, y, budget, cfg)
    if giant is not None:
        if system is None:
            return _giant_primitive(gens, giant, x, y, budget, cfg)
        return _giant_imprimitive(gens, giant, x, y, budget, cfg)
    raise ResourceLimitExceeded(
        f"transitive group with quotient order {h_order} and no recognized "
        f"quotient structure"
    )


def _recurse_with(cfg: "SolverConfig") -> Recurse:
    def run(
        gens: GenSet,
        x: ColoredString,
        y: ColoredString,
        budget: RecursionBudget,
    ) -> IsoCoset:
        return _solve(gens, x, y, budget, cfg)

    return run


def _solve(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    budget.bump()
    if x.n != y.n or x.alphabet_size != y.alphabet_size:
        raise StringError("strings live on different domains")
    if x.n != gens.degree:
        raise StringError("string length differs from group degree")
    if x.letter_counts() != y.letter_counts():
        return IsoCoset.empty()
    if not gens.gens or all(g.is_identity() for g in gens):
        return _direct_check(x, y)
    cells = orbits(gens)
    if len(cells) > 1:
        recurse = _recurse_with(cfg)
        current = IsoCoset.of(gens, Permutation.identity(gens.degree))
        for cell in sorted(cells, key=lambda c: (len(c), tuple(c))):
            current = iso_window(current, x, y, cell, recurse, budget)
            if current.is_empty():
                return current
        return current
    return _solve_transitive(gens, x, y, budget, cfg)


def main_string_iso(
    gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    config: Optional[SolverConfig] = None,
    budget: Optional[RecursionBudget] = None,
) -> IsoCoset:
    """Isomorphisms of x onto y inside <gens>: the pure recursive engine
    extended with quotient enumeration and the alternating quotient
    reductions, dispatched by quotient size.  Output is verified before
    return."""
    if config is None:
        config = SolverConfig()
    if budget is None:
        budget = config.budget()
    result = _solve(pruned_gens(gens), x, y, budget, config)
    _verify_coset(gens, x, y, result)
    return result


def align(
    x: ColoredString,
    y: ColoredString,
    gens: GenSet,
    config: Optional[SolverConfig] = None,
) -> Optional[Permutation]:
    """One group element carrying x onto y, or None."""
    found = main_string_iso(gens, x, y, config)
    return None if found.is_empty() else found.rep


# -- the imprimitive reduction ----------------------------------------------


def _orbit_groups(orbit_list: Sequence[tuple], m: int) -> list[tuple]:
    """Partition-branch groups keyed by orbit length: fixed points form one
    free class, longer orbits become interchangeable equal-size parts."""
    by_len: dict[int, list[tuple]] = {}
    for orb in orbit_list:
        by_len.setdefault(len(orb), []).append(tuple(sorted(orb)))
    groups: list[tuple] = []
    for ell in sorted(by_len):
        members = tuple(sorted(v for orb in by_len[ell] for v in orb))
        parts = None if ell == 1 else tuple(sorted(by_len[ell]))
        groups.append(((ell,), members, parts))
    return groups


def _full_symmetry_coset(
    gens: GenSet,
    hom: Homomorphism,
    has_odd: bool,
    f_gens: GenSet,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """The certified automorphisms already cover the whole alternating
    quotient, so only the kernel is undecided.

    Every even quotient image is reached by the certified group, every odd
    one differs from a fixed transposition lift by an even image, so three
    kernel solves settle the group and the representative: the kernel's own
    automorphisms, the kernel coset of the transposition, and the kernel
    coset carrying x to y.
    """
    m = hom.image_degree
    kernel = pruned_gens(hom.kernel_gens())
    child = budget.deeper()
    self_piece = _solve(kernel, x, x, child, cfg)
    if self_piece.is_empty():
        raise InternalInconsistency("the kernel loses the identity automorphism")
    collected = list(self_piece.aut_gens.gens) + [self_piece.rep]
    collected.extend(f_gens.gens)
    tau = None
    if has_odd:
        t_images = list(range(m))
        t_images[0], t_images[1] = 1, 0
        tau = hom.lift(Permutation(tuple(t_images)))
        odd_piece = _solve(kernel, x, x.permuted(tau.inverse()), child, cfg)
        if not odd_piece.is_empty():
            collected.append(odd_piece.rep * tau)
    merged = tuple(
        dict.fromkeys(g for g in collected if not g.is_identity())
    )
    aut = pruned_gens(GenSet(gens.degree, merged)) if merged else GenSet.trivial(
        gens.degree
    )
    rep: Optional[Permutation] = None
    straight = _solve(kernel, x, y, child, cfg)
    if not straight.is_empty():
        rep = straight.rep
    elif tau is not None:
        shifted = _solve(kernel, x, y.permuted(tau.inverse()), child, cfg)
        if not shifted.is_empty():
            rep = shifted.rep * tau
    budget.absorb(child)
    if rep is None:
        return IsoCoset.empty()
    return IsoCoset.of(aut, rep)


def _giant_imprimitive(
    gens: GenSet,
    giant: GiantQuotient,
    x: ColoredString,
    y: ColoredString,
    budget: RecursionBudget,
    cfg: "SolverConfig",
) -> IsoCoset:
    """Imprimitive action whose block quotient moves k-subsets of an ideal
    domain: build a local certificate for every small subset of that
    domain, aggregate the certified symmetry, and branch on the outcome.

    A certified group covering the whole quotient reduces to kernel solves;
    a big certified orbit splits or individualizes the domain; an orbit
    partition branches on it; and with no symmetry at all the pairwise
    certificate comparisons furnish a relational structure to split.
    """
    from . import certificates as certs

    m, hom, has_odd = giant.m, giant.hom, giant.has_odd
    k = certs.default_subset_size(x.n, m)
    solver = _recurse_with(cfg)
    agg_x = _aggregate_for(certs, hom, x, k, solver, budget)
    if agg_x.case == "large_symmetry" and len(agg_x.support) == m:
        return _full_symmetry_coset(
            gens, hom, has_odd, agg_x.group_gens, x, y, budget, cfg
        )
    if agg_x.case == "low_transitivity":
        width = max(agg_x.transitivity - 1, 1)
        points = tuple(sorted(agg_x.support))[:width]
        return _point_branch(gens, hom, has_odd, points, x, y, budget, cfg)
    agg_y = _aggregate_for(certs, hom, y, k, solver, budget)
    if agg_y.case != agg_x.case or len(agg_y.support) != len(agg_x.support):
        return IsoCoset.empty()
    if agg_x.case == "orbit_partition":
        return _groups_branch(
            gens,
            hom,
            has_odd,
            _orbit_groups(agg_x.orbits, m),
            _orbit_groups(agg_y.orbits, m),
            x,
            y,
            budget,
            cfg,
        )
    if agg_x.case == "large_symmetry":
        in_x, in_y = set(agg_x.support), set(agg_y.support)
        return _coloring_branch(
            gens,
            hom,
            has_odd,
            tuple(0 if v in in_x else 1 for v in range(m)),
            tuple(0 if v in in_y else 1 for v in range(m)),
            x,
            y,
            budget,
            cfg,
        )
    if agg_x.support:
        in_x, in_y = set(agg_x.support), set(agg_y.support)
        return _coloring_branch(
            gens,
            hom,
            has_odd,
            tuple(0 if v in in_x else 1 for v in range(m)),
            tuple(0 if v in in_y else 1 for v in range(m)),
            x,
            y,
            budget,
            cfg,
        )
    cls_x, cls_y = certs.comparison_classes(hom, (x, y), k, solver, budget)
    palette = 1 + max(max(cls_x.values()), max(cls_y.values()))
    rel_x = _class_structure(cls_x, m, k, palette)
    rel_y = _class_structure(cls_y, m, k, palette)
    return _design_reduction(
        gens,
        hom,
        has_odd,
        wl(f1_refine(rel_x)),
        lambda: wl(f1_refine(rel_y)),
        x,
        y,
        budget,
        cfg,
        on_x_split=lambda: _point_branch(
            gens, hom, has_odd, (0,), x, y, budget, cfg
        ),
    )


def _aggregate_for(certs, hom: Homomorphism, x: ColoredString, k: int, solver, budget):
    m = hom.image_degree
    built = {}
    gamma: list[Permutation] = []
    for t in itertools.combinations(range(m), k):
        cert = certs.local_certificate(hom, t, x, solver, budget)
        built[t] = cert
        if cert.kind != "full":
            continue
        gamma.extend(g for g in cert.gamma_gens if not g.is_identity())
        # Once the certified ideal action holds the whole alternating
        # group, further subsets cannot change the aggregate case.
        if gamma and certs.contains_full_alternating(GenSet(m, tuple(gamma))):
            break
    return certs.aggregate_certificates(hom, built)


def _class_structure(
    classes: dict, m: int, k: int, palette: int
) -> RelStructure:
    rels: list[set[tuple[int, ...]]] = [set() for _ in range(palette)]
    for t, c in classes.items():
        rels[c].add(t)
    return RelStructure(m, k, tuple(frozenset(r) for r in rels))

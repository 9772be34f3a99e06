"""Permutation groups over a fixed finite point domain.

Dense permutations on points 0..n-1, deterministic stabilizer chains built by
sifting (no randomization anywhere), and the derived operations the rest of
the package needs: orbits, block systems, pointwise and setwise stabilizers,
subgroups cut out by a membership test, and preimages under a homomorphism
given by generator images.

Conventions, fixed once and used everywhere:

* Elements act on the right: ``r ** (p * q) == (r ** p) ** q``, and ``p * q``
  means "apply p, then q".
* A chain with base ``x_0, x_1, ...`` stores at level i a transversal
  ``C_i`` of right cosets, keyed by the image of ``x_i``; the identity sits
  in every level.  Sifting peels representatives off the right, so a group
  member decomposes as ``g == h_k * ... * h_1 * h_0`` with ``h_i`` drawn from
  ``C_i`` (the level-0 representative is applied last).
* Generating sets returned by operations here are harvested from a freshly
  built chain, which bounds them by the sum of orbit sizes (at most about
  n^2 / 2) and makes them reproducible.

The element enumerator at the bottom is a plain breadth-first product
closure.  It shares nothing with the chain machinery on purpose: it is the
independent cross-check the tests compare chain answers against.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import InternalInconsistency, ResourceLimitExceeded


class GroupError(ValueError):
    """Bad group input: degree mismatch, intransitivity where transitivity is
    required, a point out of range, or an exceeded index bound."""


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of 0..n-1 stored as its image tuple; ordering is by
    image tuple, so the identity sorts first within any one degree."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise GroupError(f"not a permutation of 0..{n - 1}: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(n))
        for cycle in cycles:
            for point in cycle:
                if not 0 <= point < n:
                    raise GroupError(f"cycle point {point} outside 0..{n - 1}")
            for i, point in enumerate(cycle):
                images[point] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    def apply(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # self first, then other
        if other.degree != self.degree:
            raise GroupError("degree mismatch in composition")
        o = other.images
        return Permutation(tuple(o[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def parity(self) -> int:
        """0 for even, 1 for odd."""
        seen = [False] * len(self.images)
        odd = 0
        for start in range(len(self.images)):
            if seen[start]:
                continue
            length = 0
            point = start
            while not seen[point]:
                seen[point] = True
                point = self.images[point]
                length += 1
            odd ^= (length - 1) & 1
        return odd

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, least point first in each, sorted by least point."""
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = []
            point = start
            while not seen[point]:
                seen[point] = True
                cyc.append(point)
                point = self.images[point]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycs)


@dataclass(frozen=True)
class GenSet:
    """A generating set; an empty one generates the trivial group."""

    degree: int
    gens: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        for g in self.gens:
            if g.degree != self.degree:
                raise GroupError(
                    f"generator degree {g.degree} != declared degree {self.degree}"
                )

    @classmethod
    def trivial(cls, n: int) -> "GenSet":
        return cls(n, ())

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.gens)


def symmetric_gens(n: int) -> GenSet:
    """The usual two generators of the full symmetric group."""
    if n <= 1:
        return GenSet.trivial(max(n, 0))
    if n == 2:
        return GenSet(2, (Permutation.from_cycles(2, [(0, 1)]),))
    return GenSet(
        n,
        (
            Permutation.from_cycles(n, [(0, 1)]),
            Permutation.from_cycles(n, [tuple(range(n))]),
        ),
    )


def alternating_gens(n: int) -> GenSet:
    """Two generators of the even subgroup: a 3-cycle and an n-cycle or
    (n-1)-cycle chosen by parity so both generators are even."""
    if n <= 2:
        return GenSet.trivial(max(n, 0))
    three = Permutation.from_cycles(n, [(0, 1, 2)])
    if n == 3:
        return GenSet(3, (three,))
    if n % 2 == 1:
        big = Permutation.from_cycles(n, [tuple(range(n))])
    else:
        big = Permutation.from_cycles(n, [tuple(range(1, n))])
    return GenSet(n, (three, big))


# ---------------------------------------------------------------------------
# the chain engine
#
# Internally elements are tuples of image tuples ("tracked elements"): one
# component for a plain group, two when every element drags its image under a
# homomorphism along.  All component permutations compose in lock step.

_Raw = tuple[tuple[int, ...], ...]


def _raw_identity(degrees: tuple[int, ...]) -> _Raw:
    return tuple(tuple(range(d)) for d in degrees)


def _raw_mul(a: _Raw, b: _Raw) -> _Raw:
    return tuple(tuple(map(bc.__getitem__, ac)) for ac, bc in zip(a, b))


def _raw_inv(a: _Raw) -> _Raw:
    out = []
    for comp in a:
        inv = [0] * len(comp)
        for i, j in enumerate(comp):
            inv[j] = i
        out.append(tuple(inv))
    return tuple(out)


def _is_raw_identity(a: _Raw) -> bool:
    return all(all(i == j for i, j in enumerate(comp)) for comp in a)


class _PointLevel:
    """Transversal keyed by the image of one point of one component."""

    __slots__ = ("comp", "point", "table")

    def __init__(self, comp: int, point: int):
        self.comp = comp
        self.point = point
        self.table: dict[int, tuple[_Raw, _Raw]] = {}

    def key(self, el: _Raw) -> int:
        return el[self.comp][self.point]

    def reps(self) -> list[_Raw]:
        return [self.table[k][0] for k in sorted(self.table)]

    def size(self) -> int:
        return len(self.table)


class _TestLevel:
    """Coset transversal against a membership test rather than a point.

    ``key_fn``, when given, must be constant exactly on right cosets of the
    tested subgroup; it turns the linear scan into a dict lookup.
    """

    __slots__ = ("test", "key_fn", "bound", "listing", "keyed")

    def __init__(self, test, key_fn, bound):
        self.test = test
        self.key_fn = key_fn
        self.bound = bound
        self.listing: list[_Raw] = []
        self.keyed: dict = {}

    def reps(self) -> list[_Raw]:
        return list(self.listing)

    def size(self) -> int:
        return len(self.listing)


class _Chain:
    """A stabilizer chain over tracked elements, built by sifting.

    Levels are consumed front to back; a member decomposes as
    ``g == h_last * ... * h_0`` with ``h_i`` the representative consumed at
    level i (level 0 applied last, matching right-action composition).
    """

    def __init__(self, degrees: tuple[int, ...], levels: list):
        self.degrees = degrees
        self.levels = levels
        ident = _raw_identity(degrees)
        for lvl in levels:
            if isinstance(lvl, _PointLevel):
                lvl.table[lvl.point] = (ident, ident)
            else:
                lvl.listing.append(ident)
                if lvl.key_fn is not None:
                    lvl.keyed[lvl.key_fn(ident)] = ident

    # -- sifting ----------------------------------------------------------

    def sift(self, el: _Raw) -> tuple[int, _Raw]:
        """Peel representatives off; returns (stop level, residue)."""
        for i, lvl in enumerate(self.levels):
            if isinstance(lvl, _PointLevel):
                hit = lvl.table.get(el[lvl.comp][lvl.point])
                if hit is None:
                    return i, el
                el = _raw_mul(el, hit[1])
            else:
                rep = self._test_level_rep(lvl, el)
                if rep is None:
                    return i, el
                el = _raw_mul(el, _raw_inv(rep))
        return len(self.levels), el

    def _test_level_rep(self, lvl: _TestLevel, el: _Raw) -> Optional[_Raw]:
        if lvl.key_fn is not None:
            return lvl.keyed.get(lvl.key_fn(el))
        for rep in lvl.listing:
            if lvl.test(_raw_mul(el, _raw_inv(rep))):
                return rep
        return None

    def _insert(self, i: int, el: _Raw) -> None:
        lvl = self.levels[i]
        if isinstance(lvl, _PointLevel):
            lvl.table[el[lvl.comp][lvl.point]] = (el, _raw_inv(el))
        else:
            if lvl.bound is not None and len(lvl.listing) >= lvl.bound:
                raise GroupError(
                    f"coset count exceeded the declared bound {lvl.bound}"
                )
            lvl.listing.append(el)
            if lvl.key_fn is not None:
                lvl.keyed[lvl.key_fn(el)] = el

    # -- closure ----------------------------------------------------------

    def build(self, gens: Iterable[_Raw]) -> None:
        """Deterministic sift-and-close: every new representative is
        multiplied against every representative on both sides and the
        products are sifted until nothing new appears."""
        work = list(gens)
        seen: set[_Raw] = set(work)
        while work:
            el = work.pop()
            i, residue = self.sift(el)
            if i == len(self.levels):
                if not _is_raw_identity(residue):
                    raise InternalInconsistency(
                        "residue survived a full-length chain"
                    )
                continue
            self._insert(i, residue)
            for lvl in self.levels:
                for rep in lvl.reps():
                    for prod in (_raw_mul(rep, residue), _raw_mul(residue, rep)):
                        if prod not in seen:
                            seen.add(prod)
                            work.append(prod)

    # -- derived data ------------------------------------------------------

    def order(self) -> int:
        total = 1
        for lvl in self.levels:
            total *= lvl.size()
        return total

    def point_level_sizes(self) -> list[int]:
        return [lvl.size() for lvl in self.levels]

    def contains(self, el: _Raw) -> bool:
        i, residue = self.sift(el)
        return i == len(self.levels) and _is_raw_identity(residue)

    def harvest(self, from_level: int = 0) -> list[_Raw]:
        """All non-identity representatives at levels >= from_level; these
        generate the corresponding stabilizer subgroup."""
        out = []
        for lvl in self.levels[from_level:]:
            for rep in lvl.reps():
                if not _is_raw_identity(rep):
                    out.append(rep)
        return sorted(set(out))

    def elements(self, cap: Optional[int] = None) -> Iterator[_Raw]:
        """Every element, as products over the level transversals, deepest
        level first.  Deterministic order."""
        if cap is not None and self.order() > cap:
            raise ResourceLimitExceeded(
                f"group order {self.order()} exceeds enumeration cap {cap}"
            )
        rep_lists = [lvl.reps() for lvl in self.levels]

        # members decompose as h_deepest * ... * h_0 (the level-0 factor
        # acts last), matching the sift direction
        def rec(i: int, acc: _Raw) -> Iterator[_Raw]:
            if i < 0:
                yield acc
                return
            for rep in rep_lists[i]:
                yield from rec(i - 1, _raw_mul(acc, rep))

        ident = _raw_identity(self.degrees)
        yield from rec(len(self.levels) - 1, ident)

    def filtered_elements(
        self,
        accept: Callable[[int, int], bool],
        node_cap: Optional[int] = None,
    ) -> Iterator[_Raw]:
        """Members passing ``accept(base_point, image)`` at every level,
        found by choosing the level-0 factor first: once the factors up to
        level i are fixed, the images of base[0..i] are settled, so a
        rejected image kills the whole branch.

        Requires a single-component chain of point levels.  Only base-point
        images are tested; callers recheck anything finer on the results.
        """
        for lvl in self.levels:
            if not isinstance(lvl, _PointLevel) or lvl.comp != 0:
                raise GroupError("filtered search needs a plain point chain")
        rep_lists = [lvl.reps() for lvl in self.levels]
        points = [lvl.point for lvl in self.levels]
        depth = len(self.levels)
        visited = 0

        def rec(i: int, acc: _Raw) -> Iterator[_Raw]:
            nonlocal visited
            if i == depth:
                yield acc
                return
            b = points[i]
            for rep in rep_lists[i]:
                visited += 1
                if node_cap is not None and visited > node_cap:
                    raise ResourceLimitExceeded(
                        f"filtered search exceeded {node_cap} nodes"
                    )
                nxt = _raw_mul(rep, acc)
                if accept(b, nxt[0][b]):
                    yield from rec(i + 1, nxt)

        yield from rec(0, _raw_identity(self.degrees))

    def prefix_transversal(self, depth: int) -> list[_Raw]:
        """One representative per coset of the level->depth stabilizer:
        products over the first ``depth`` levels only."""
        rep_lists = [lvl.reps() for lvl in self.levels[:depth]]
        out = [_raw_identity(self.degrees)]
        # deeper factors multiply on the left, as in the sift decomposition
        for reps in rep_lists:
            out = [_raw_mul(rep, acc) for acc in out for rep in reps]
        return out

    def element_with_level_images(
        self, wants: Sequence[tuple[int, int, int]]
    ) -> Optional[_Raw]:
        """An element sending, for each (comp, point, target) in ``wants``,
        that point to that target; None if no such element exists.

        The wants must name a prefix of this chain's point levels, in order.
        """
        acc = _raw_identity(self.degrees)
        acc_inv = acc
        for lvl, (comp, point, target) in zip(self.levels, wants):
            if not isinstance(lvl, _PointLevel) or (lvl.comp, lvl.point) != (
                comp,
                point,
            ):
                raise InternalInconsistency("wants do not match chain base")
            hit = lvl.table.get(acc_inv[comp][target])
            if hit is None:
                return None
            acc = _raw_mul(hit[0], acc)
            acc_inv = _raw_inv(acc)
        return acc


def _plain_base(degree: int, hint: Optional[Sequence[int]]) -> list[int]:
    base: list[int] = []
    if hint:
        for p in hint:
            if not 0 <= p < degree:
                raise GroupError(f"base point {p} outside 0..{degree - 1}")
            if p not in base:
                base.append(p)
    base.extend(p for p in range(degree) if p not in base)
    if degree > 0:
        base = base[: degree - 1] if len(base) >= degree else base
    return base


def _build_chain(
    degrees: tuple[int, ...],
    levels: list,
    gens: Iterable[_Raw],
) -> _Chain:
    chain = _Chain(degrees, levels)
    chain.build(gens)
    return chain


# ---------------------------------------------------------------------------
# public chain type


class StabilizerChain:
    """A chain for a plain permutation group.

    ``base`` lists the stabilized points; ``tables[i]`` maps the image of
    ``base[i]`` to the coset representative realizing it, with the identity
    under ``base[i]`` itself.  ``order`` is the product of table sizes, an
    exact python int.
    """

    def __init__(self, degree: int, chain: _Chain, base: tuple[int, ...]):
        self.degree = degree
        self._chain = chain
        self.base = base

    @property
    def tables(self) -> list[dict[int, Permutation]]:
        out = []
        for lvl in self._chain.levels:
            out.append(
                {key: Permutation(pair[0][0]) for key, pair in lvl.table.items()}
            )
        return out

    @property
    def order(self) -> int:
        return self._chain.order()

    def sift(self, g: Permutation) -> tuple[int, Permutation]:
        """Stop level and residue; ``g`` is a member exactly when the level
        equals len(base) and the residue is the identity.  The consumed
        representatives satisfy g == residue-free product, level 0 applied
        last."""
        if g.degree != self.degree:
            raise GroupError("degree mismatch in sift")
        i, residue = self._chain.sift((g.images,))
        return i, Permutation(residue[0])

    def contains(self, g: Permutation) -> bool:
        i, residue = self.sift(g)
        return i == len(self._chain.levels) and residue.is_identity()

    def strong_gens(self, from_level: int = 0) -> GenSet:
        raws = self._chain.harvest(from_level)
        return GenSet(self.degree, tuple(Permutation(r[0]) for r in raws))

    def elements(self, cap: Optional[int] = None) -> Iterator[Permutation]:
        for raw in self._chain.elements(cap):
            yield Permutation(raw[0])

    def filtered_elements(
        self,
        accept: Callable[[int, int], bool],
        node_cap: Optional[int] = None,
    ) -> Iterator[Permutation]:
        """Members whose image of every base point passes
        ``accept(point, image)``, by transversal backtracking.  Much faster
        than a full scan when the test kills most branches early; results
        still need any finer leaf check the caller cares about."""
        for raw in self._chain.filtered_elements(accept, node_cap):
            yield Permutation(raw[0])

    def element_mapping(
        self, points: Sequence[int], targets: Sequence[int]
    ) -> Optional[Permutation]:
        """A member sending points[i] to targets[i] for every i, or None.
        The points must be an initial segment of the base."""
        if list(points) != list(self.base[: len(points)]):
            raise GroupError("points must form a prefix of the chain base")
        wants = [(0, p, t) for p, t in zip(points, targets)]
        raw = self._chain.element_with_level_images(wants)
        return None if raw is None else Permutation(raw[0])


def schreier_sims(
    gens: GenSet, base_hint: Optional[Sequence[int]] = None
) -> StabilizerChain:
    """Deterministic stabilizer chain for <gens>."""
    return _chain_cached(gens, tuple(base_hint) if base_hint else None)


@lru_cache(maxsize=512)
def _chain_cached(gens: GenSet, base_hint: Optional[tuple[int, ...]]):
    base = _plain_base(gens.degree, base_hint)
    levels: list = [_PointLevel(0, p) for p in base]
    chain = _build_chain((gens.degree,), levels, [(g.images,) for g in gens])
    return StabilizerChain(gens.degree, chain, tuple(base))


def group_order(gens: GenSet) -> int:
    return schreier_sims(gens).order


def is_member(gens: GenSet, g: Permutation) -> bool:
    return schreier_sims(gens).contains(g)


def pruned_gens(gens: GenSet) -> GenSet:
    """Equivalent generating set harvested from a fresh chain (at most about
    n^2/2 generators, deterministic)."""
    return schreier_sims(gens).strong_gens()


# ---------------------------------------------------------------------------
# orbits and blocks


def orbits(gens: GenSet, points: Optional[Iterable[int]] = None) -> list[list[int]]:
    """Orbit cells as sorted lists, ordered by least element."""
    domain = list(points) if points is not None else list(range(gens.degree))
    remaining = set(domain)
    cells = []
    for start in domain:
        if start not in remaining:
            continue
        cell = {start}
        frontier = [start]
        while frontier:
            p = frontier.pop()
            for g in gens:
                q = g.images[p]
                if q not in cell:
                    cell.add(q)
                    frontier.append(q)
        if not cell <= remaining:
            raise GroupError("orbit left the requested point set")
        remaining -= cell
        cells.append(sorted(cell))
    return cells


def is_transitive(gens: GenSet) -> bool:
    return gens.degree <= 1 or len(orbits(gens)) == 1


def orbit_transversal(gens: GenSet, point: int) -> dict[int, Permutation]:
    """For each orbit point q, one group element sending ``point`` to q."""
    reps = {point: Permutation.identity(gens.degree)}
    frontier = [point]
    while frontier:
        p = frontier.pop(0)
        for g in gens:
            q = g.images[p]
            if q not in reps:
                reps[q] = reps[p] * g
                frontier.append(q)
    return reps


@dataclass(frozen=True)
class BlockSystem:
    """A G-invariant partition into equal-size blocks, ordered by least
    element; ``degree`` is the size of the underlying domain."""

    degree: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        sizes = {len(b) for b in self.blocks}
        if len(sizes) != 1:
            raise GroupError("blocks of unequal size")
        covered = sorted(p for b in self.blocks for p in b)
        if covered != list(range(self.degree)):
            raise GroupError("blocks do not partition the domain")

    @property
    def block_of(self) -> dict[int, int]:
        return {p: i for i, b in enumerate(self.blocks) for p in b}


def _smallest_block_with(gens: GenSet, a: int, b: int) -> set[int]:
    """The least block of imprimitivity containing both a and b: the
    connected component of a in the orbit of the edge {a, b}."""
    parent = list(range(gens.degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    union(a, b)
    frontier = [(a, b)]
    seen = {(min(a, b), max(a, b))}
    while frontier:
        u, v = frontier.pop()
        for g in gens:
            x, y = g.images[u], g.images[v]
            key = (min(x, y), max(x, y))
            if key not in seen:
                seen.add(key)
                frontier.append((x, y))
            union(x, y)
    root = find(a)
    return {p for p in range(gens.degree) if find(p) == root}


def _one_block_coarsening(gens: GenSet) -> Optional[BlockSystem]:
    """A nontrivial block system for a transitive group, or None if the
    action is primitive.  Deterministic: least seed pair wins."""
    n = gens.degree
    for b in range(1, n):
        block = _smallest_block_with(gens, 0, b)
        if len(block) < n and len(block) > 1:
            reps = orbit_transversal(gens, 0)
            blocks = set()
            for g in reps.values():
                blocks.add(tuple(sorted(g.images[p] for p in block)))
            ordered = tuple(sorted(blocks))
            return BlockSystem(n, ordered)
    return None


def block_action(gens: GenSet, system: BlockSystem) -> tuple[GenSet, list[Permutation]]:
    """The induced generators on block indices, paired with the originals."""
    index_of = system.block_of
    induced = []
    for g in gens:
        images = [0] * len(system.blocks)
        for i, block in enumerate(system.blocks):
            images[i] = index_of[g.images[block[0]]]
        induced.append(Permutation(tuple(images)))
    return GenSet(len(system.blocks), tuple(induced)), list(gens.gens)


def minimal_block_system(gens: GenSet) -> Optional[BlockSystem]:
    """Maximal blocks: the coarsest nontrivial invariant partition reached by
    repeatedly coarsening, so the induced action on returned blocks is
    primitive.  None means the action is already primitive.  Raises on an
    intransitive group."""
    return _blocks_cached(gens)


@lru_cache(maxsize=512)
def _blocks_cached(gens: GenSet) -> Optional[BlockSystem]:
    if gens.degree <= 1:
        return None
    if not is_transitive(gens):
        raise GroupError("block systems require a transitive action")
    current: Optional[BlockSystem] = None
    acting = gens
    while True:
        step = _one_block_coarsening(acting)
        if step is None:
            return current
        if current is None:
            current = step
        else:
            merged = tuple(
                sorted(
                    tuple(sorted(p for i in coarse for p in current.blocks[i]))
                    for coarse in step.blocks
                )
            )
            current = BlockSystem(gens.degree, merged)
        acting, _ = block_action(gens, current)


# ---------------------------------------------------------------------------
# stabilizers and tested subgroups


def pointwise_stabilizer(gens: GenSet, points: Sequence[int]) -> GenSet:
    """Generators of the subgroup fixing every listed point, harvested from
    a chain rebased so those points come first."""
    pts: list[int] = []
    for p in points:
        if p not in pts:
            pts.append(p)
    chain = schreier_sims(gens, base_hint=pts)
    depth = min(len(pts), len(chain._chain.levels))
    return chain.strong_gens(from_level=depth)


def subgroup_by_test(
    gens: GenSet,
    test: Callable[[Permutation], bool],
    index_bound: int,
    key_fn: Optional[Callable[[Permutation], object]] = None,
) -> GenSet:
    """Generators of H = {g : test(g)}, which must be a subgroup of <gens>
    of index at most index_bound.  ``key_fn``, when supplied, must be
    constant exactly on right cosets of H and speeds the transversal up."""
    chain = _tested_chain(gens, test, index_bound, key_fn)
    raws = chain.harvest(from_level=1)
    return GenSet(gens.degree, tuple(Permutation(r[0]) for r in raws))


def left_coset_reps(
    gens: GenSet,
    test: Callable[[Permutation], bool],
    index_bound: int,
    key_fn: Optional[Callable[[Permutation], object]] = None,
) -> list[Permutation]:
    """Representatives r with <gens> the disjoint union of the sets
    {h * r : test(h)}; the identity comes first."""
    chain = _tested_chain(gens, test, index_bound, key_fn)
    return [Permutation(r[0]) for r in chain.levels[0].reps()]


def _tested_chain(gens, test, index_bound, key_fn) -> _Chain:
    def raw_test(el: _Raw) -> bool:
        return test(Permutation(el[0]))

    raw_key = None
    if key_fn is not None:

        def raw_key(el: _Raw):
            return key_fn(Permutation(el[0]))

    base = _plain_base(gens.degree, None)
    levels: list = [_TestLevel(raw_test, raw_key, index_bound)]
    levels.extend(_PointLevel(0, p) for p in base)
    return _build_chain((gens.degree,), levels, [(g.images,) for g in gens])


def setwise_stabilizer_smallk(
    gens: GenSet, subset: Iterable[int], k_max: int = 6
) -> GenSet:
    """Setwise stabilizer of a subset of at most k_max points, via a tested
    transversal keyed by the subset's image (index at most n^|subset|)."""
    target = frozenset(subset)
    if len(target) > k_max:
        raise GroupError(f"setwise stabilizer limited to {k_max} points")
    for p in target:
        if not 0 <= p < gens.degree:
            raise GroupError(f"point {p} outside the domain")
    bound = math.comb(gens.degree, len(target)) if target else 1

    def test(g: Permutation) -> bool:
        return frozenset(g.images[p] for p in target) == target

    def key(g: Permutation) -> frozenset:
        return frozenset(g.images[p] for p in target)

    return subgroup_by_test(gens, test, index_bound=bound, key_fn=key)


# ---------------------------------------------------------------------------
# homomorphisms given on generators


class Homomorphism:
    """A homomorphism <gens> -> Sym(image degree), defined by one image per
    generator and carried through all products by pair tracking.

    The mixed chain stabilizes image points first, then source points, so
    kernel generators and preimages fall straight out of the tables.
    """

    def __init__(
        self,
        source: GenSet,
        images: Sequence[Permutation],
        image_degree: int,
    ):
        if len(images) != len(source.gens):
            raise GroupError("one image per generator required")
        for im in images:
            if im.degree != image_degree:
                raise GroupError("image degree mismatch")
        self.source = source
        self.images = tuple(images)
        self.image_degree = image_degree
        self._mixed: Optional[_Chain] = None
        self._source_first: Optional[_Chain] = None

    def _pairs(self) -> list[_Raw]:
        return [
            (g.images, im.images) for g, im in zip(self.source.gens, self.images)
        ]

    def _mixed_chain(self) -> _Chain:
        if self._mixed is None:
            img_base = _plain_base(self.image_degree, None)
            src_base = _plain_base(self.source.degree, None)
            levels: list = [_PointLevel(1, p) for p in img_base]
            levels.extend(_PointLevel(0, p) for p in src_base)
            self._mixed = _build_chain(
                (self.source.degree, self.image_degree), levels, self._pairs()
            )
        return self._mixed

    def _source_first_chain(self) -> _Chain:
        if self._source_first is None:
            src_base = _plain_base(self.source.degree, None)
            img_base = _plain_base(self.image_degree, None)
            levels: list = [_PointLevel(0, p) for p in src_base]
            levels.extend(_PointLevel(1, p) for p in img_base)
            self._source_first = _build_chain(
                (self.source.degree, self.image_degree), levels, self._pairs()
            )
        return self._source_first

    @property
    def image_levels(self) -> int:
        return len(_plain_base(self.image_degree, None))

    def kernel_gens(self) -> GenSet:
        chain = self._mixed_chain()
        raws = chain.harvest(from_level=self.image_levels)
        for r in raws:
            if not all(i == j for i, j in enumerate(r[1])):
                raise InternalInconsistency("kernel harvest moved image points")
        return GenSet(self.source.degree, tuple(Permutation(r[0]) for r in raws))

    def image_gens(self) -> GenSet:
        return GenSet(self.image_degree, self.images)

    def image_order(self) -> int:
        chain = self._mixed_chain()
        total = 1
        for lvl in chain.levels[: self.image_levels]:
            total *= lvl.size()
        return total

    def image_of(self, g: Permutation) -> Permutation:
        """phi(g) for any g in <gens>; raises if g is not in the source."""
        chain = self._source_first_chain()
        acc: _Raw = _raw_identity((self.source.degree, self.image_degree))
        el: _Raw = (g.images, tuple(range(self.image_degree)))
        # peel source levels, accumulating the consumed representatives;
        # their image parts multiply to phi(g)
        for lvl in chain.levels:
            if lvl.comp != 0:
                break
            hit = lvl.table.get(el[0][lvl.point])
            if hit is None:
                raise GroupError("element is not in the source group")
            acc = _raw_mul(hit[0], acc)
            el = _raw_mul(el, hit[1])
        if not all(i == j for i, j in enumerate(el[0])):
            raise GroupError("element is not in the source group")
        return Permutation(acc[1])

    def lift(self, target: Permutation) -> Permutation:
        """Some g with phi(g) == target; raises if the target is outside
        phi(<gens>)."""
        raw = self._lift_raw(target)
        if raw is None:
            raise GroupError("target is not in the image of the homomorphism")
        return Permutation(raw[0])

    def _lift_raw(self, target: Permutation) -> Optional[_Raw]:
        chain = self._mixed_chain()
        acc = _raw_identity((self.source.degree, self.image_degree))
        acc_inv = acc
        for lvl in chain.levels[: self.image_levels]:
            hit = lvl.table.get(acc_inv[1][target.images[lvl.point]])
            if hit is None:
                return None
            acc = _raw_mul(hit[0], acc)
            acc_inv = _raw_inv(acc)
        return acc

    def in_image(self, target: Permutation) -> bool:
        return self._lift_raw(target) is not None

    def preimage_of_subgroup(self, target: GenSet) -> GenSet:
        """Generators of phi^{-1}(<target>): kernel generators plus one lift
        per target generator.  Raises if the target is not inside the
        image."""
        if target.degree != self.image_degree:
            raise GroupError("target degree mismatch")
        lifts = [self.lift(t) for t in target.gens]
        kernel = self.kernel_gens()
        return GenSet(self.source.degree, tuple(kernel.gens) + tuple(lifts))

    def kernel_coset_reps(self, cap: Optional[int] = None) -> list[Permutation]:
        """One source element per image-group element (a transversal of the
        kernel), enumerated deterministically."""
        if cap is not None and self.image_order() > cap:
            raise ResourceLimitExceeded(
                f"image order {self.image_order()} exceeds cap {cap}"
            )
        chain = self._mixed_chain()
        return [Permutation(r[0]) for r in chain.prefix_transversal(self.image_levels)]

    def element_with_image_action(
        self, points: Sequence[int], targets: Sequence[int]
    ) -> Optional[Permutation]:
        """A source element whose image sends points[i] to targets[i]; None
        if no such element exists.  Backtracking over image levels."""
        want = dict(zip(points, targets))
        if len(want) != len(list(points)):
            raise GroupError("repeated constraint points")
        chain = self._mixed_chain()
        ident = _raw_identity((self.source.degree, self.image_degree))

        def rec(level: int, acc: _Raw, acc_inv: _Raw) -> Optional[_Raw]:
            if level >= self.image_levels:
                # the last image point is not a chain level; check all
                # constraints against the finished image part
                if all(acc[1][p] == t for p, t in want.items()):
                    return acc
                return None
            lvl = chain.levels[level]
            if lvl.point in want:
                hit = lvl.table.get(acc_inv[1][want[lvl.point]])
                if hit is None:
                    return None
                nxt = _raw_mul(hit[0], acc)
                return rec(level + 1, nxt, _raw_inv(nxt))
            # unconstrained level: any representative will do, but later
            # constraints may fail, so try them all in deterministic order
            for key in sorted(lvl.table):
                nxt = _raw_mul(lvl.table[key][0], acc)
                result = rec(level + 1, nxt, _raw_inv(nxt))
                if result is not None:
                    return result
            return None

        raw = rec(0, ident, ident)
        return None if raw is None else Permutation(raw[0])


def restriction_hom(gens: GenSet, window: Sequence[int]) -> Homomorphism:
    """Restriction of the action to an invariant point set, as a
    homomorphism onto Sym(len(window)) with the window sorted."""
    win = sorted(set(window))
    pos = {p: i for i, p in enumerate(win)}
    images = []
    for g in gens:
        try:
            images.append(Permutation(tuple(pos[g.images[p]] for p in win)))
        except KeyError:
            raise GroupError("window is not invariant under the group")
    return Homomorphism(gens, images, len(win))


# ---------------------------------------------------------------------------
# independent closure oracle

CLOSURE_CAP = 20000


def enumerate_elements(gens: GenSet, cap: int = CLOSURE_CAP) -> list[Permutation]:
    """Breadth-first product closure of the generators; the cross-check
    oracle for everything chain-based.  Raises past the cap."""
    ident = tuple(range(gens.degree))
    seen = {ident}
    frontier = [ident]
    gen_images = [g.images for g in gens]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gen_images:
                prod = tuple(map(g.__getitem__, el))
                if prod not in seen:
                    if len(seen) >= cap:
                        raise ResourceLimitExceeded(
                            f"closure exceeded {cap} elements"
                        )
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return [Permutation(t) for t in sorted(seen)]


# ---------------------------------------------------------------------------
# file format

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, degree: int) -> Permutation:
    """Either cycle notation "(0 1 2)(3 4)" or an image list "1 2 0"."""
    text = text.strip()
    if text.startswith("("):
        stripped = re.sub(r"\s|,", "", _CYCLE_RE.sub("", text))
        if stripped:
            raise GroupError(f"stray characters in cycle notation: {text!r}")
        cycles = []
        for m in _CYCLE_RE.finditer(text):
            entries = m.group(1).replace(",", " ").split()
            if entries:
                cycles.append(tuple(int(e) for e in entries))
        return Permutation.from_cycles(degree, cycles)
    images = tuple(int(tok) for tok in text.replace(",", " ").split())
    if len(images) != degree:
        raise GroupError(
            f"image list of length {len(images)} for degree {degree}"
        )
    return Permutation(images)


def parse_group_file(text: str) -> GenSet:
    """Group file: first relevant line "degree n", then one generator per
    line, cycles or image lists; '#' starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise GroupError("empty group file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "degree":
        raise GroupError('group file must start with "degree n"')
    degree = int(head[1])
    gens = tuple(parse_permutation(line, degree) for line in lines[1:])
    return GenSet(degree, gens)


def format_group_file(gens: GenSet) -> str:
    lines = [f"degree {gens.degree}"]
    lines.extend(str(g) for g in gens)
    return "\n".join(lines) + "\n"

"""k-ary relational structures over a finite ground set and their canonical
refinements.

A relational structure lists, per color, a set of k-tuples; nothing stops
the sets from overlapping or missing tuples.  Refinement stage one turns
membership data into a partition of the full tuple cube; stage two refines
until the coloring interacts predictably with every map of index positions,
which is the configuration property.  Both stages order their output
palettes canonically, by data computable from the input colors alone, so
isomorphic inputs get literally equal color maps after relabeling --- no
class-matching step is ever needed.

Tuples with repeated entries are separated from repetition-free ones from
stage one onward: the refinements carry each tuple's equality pattern in
the color description.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import InternalInconsistency, ResourceLimitExceeded
from .perm import GenSet, Permutation


class StructureError(ValueError):
    """Malformed structure input: bad arity, entries off the ground set,
    colors that do not partition, or an empty restriction."""


MAX_ARITY = 4
MAX_CUBE = 10**7


def equality_pattern(t: Sequence[int]) -> tuple[int, ...]:
    """First-occurrence labeling: (5, 2, 5) -> (0, 1, 0)."""
    labels: dict[int, int] = {}
    return tuple(labels.setdefault(v, len(labels)) for v in t)


def _check_cube(gamma_size: int, k: int) -> None:
    if k > MAX_ARITY:
        raise ResourceLimitExceeded(f"arity {k} above supported maximum {MAX_ARITY}")
    if gamma_size**k > MAX_CUBE:
        raise ResourceLimitExceeded(
            f"tuple cube of size {gamma_size}^{k} exceeds {MAX_CUBE}"
        )


def all_tuples(gamma_size: int, k: int) -> Iterator[tuple[int, ...]]:
    """Γ^k in lexicographic order, which is also rank order."""
    return itertools.product(range(gamma_size), repeat=k)


# ---------------------------------------------------------------------------
# palettes


class Indexer:
    """An ordered list of color descriptions; a color IS its position here.

    The description holds whatever pre-refinement data produced the color,
    so two runs over isomorphic inputs build identical indexers.
    """

    def __init__(self, descriptions: Sequence):
        self.descriptions = tuple(descriptions)
        self._lookup = {d: i for i, d in enumerate(self.descriptions)}
        if len(self._lookup) != len(self.descriptions):
            raise StructureError("palette descriptions must be unique")

    def __len__(self) -> int:
        return len(self.descriptions)

    def __getitem__(self, color: int):
        return self.descriptions[color]

    def index(self, description) -> int:
        return self._lookup[description]

    def __eq__(self, other) -> bool:
        return isinstance(other, Indexer) and self.descriptions == other.descriptions

    def __hash__(self) -> int:
        return hash(self.descriptions)

    def __repr__(self) -> str:
        return f"Indexer({len(self)} colors)"


# ---------------------------------------------------------------------------
# raw structures


@dataclass(frozen=True)
class RelStructure:
    """Ground set 0..gamma_size-1 with colored k-tuple relations, possibly
    overlapping, possibly not covering."""

    gamma_size: int
    k: int
    relations: tuple[frozenset[tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        if self.gamma_size < 1 or self.k < 1:
            raise StructureError("need a nonempty ground set and positive arity")
        _check_cube(self.gamma_size, self.k)
        for rel in self.relations:
            for t in rel:
                if len(t) != self.k:
                    raise StructureError(f"tuple {t} has the wrong arity")
                if any(not 0 <= v < self.gamma_size for v in t):
                    raise StructureError(f"tuple {t} leaves the ground set")

    def permuted(self, g: Permutation) -> "RelStructure":
        if g.degree != self.gamma_size:
            raise StructureError("permutation degree mismatch")
        return RelStructure(
            self.gamma_size,
            self.k,
            tuple(
                frozenset(tuple(g.images[v] for v in t) for t in rel)
                for rel in self.relations
            ),
        )


def graph_structure(n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> RelStructure:
    """The one-relation structure of a graph's edge set."""
    pairs = set()
    for a, b in edges:
        if a == b:
            raise StructureError("loops are not supported")
        pairs.add((a, b))
        if not directed:
            pairs.add((b, a))
    return RelStructure(n, 2, (frozenset(pairs),))


# ---------------------------------------------------------------------------
# partitioned colorings


@dataclass(frozen=True)
class Configuration:
    """A total coloring of Γ^k, stored densely in rank order.

    Equality and hashing ignore the palette: two configurations are the
    same iff they color the cube identically.
    """

    gamma_size: int
    k: int
    colors: tuple[int, ...]
    palette: Optional[Indexer] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.gamma_size < 1 or self.k < 0:
            raise StructureError("need a nonempty ground set and nonnegative arity")
        _check_cube(self.gamma_size, self.k)
        if len(self.colors) != self.gamma_size**self.k:
            raise StructureError("dense color map has the wrong length")
        seen = set(self.colors)
        if seen != set(range(len(seen))):
            raise StructureError("colors must be exactly 0..c-1")

    @property
    def num_colors(self) -> int:
        return max(self.colors) + 1

    def rank_of(self, t: Sequence[int]) -> int:
        r = 0
        for v in t:
            r = r * self.gamma_size + v
        return r

    def tuple_at(self, rank: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(rank % self.gamma_size)
            rank //= self.gamma_size
        return tuple(reversed(out))

    def color(self, t: Sequence[int]) -> int:
        return self.colors[self.rank_of(t)]

    def fibers(self) -> dict[int, list[tuple[int, ...]]]:
        out: dict[int, list[tuple[int, ...]]] = {c: [] for c in range(self.num_colors)}
        for t, c in zip(all_tuples(self.gamma_size, self.k), self.colors):
            out[c].append(t)
        return out

    def class_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.num_colors
        for c in self.colors:
            sizes[c] += 1
        return tuple(sizes)

    def partition_key(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """The underlying partition with classes sorted by least tuple;
        palette-independent, for comparing refinements."""
        return tuple(
            sorted(
                tuple(sorted(ts)) for ts in self.fibers().values()
            )
        )

    def permuted(self, g: Permutation) -> "Configuration":
        if g.degree != self.gamma_size:
            raise StructureError("permutation degree mismatch")
        out = [0] * len(self.colors)
        for t, c in zip(all_tuples(self.gamma_size, self.k), self.colors):
            out[self.rank_of(tuple(g.images[v] for v in t))] = c
        return Configuration(self.gamma_size, self.k, tuple(out), self.palette)

    # -- the structure axioms ---------------------------------------------

    @property
    def is_partition_structure(self) -> bool:
        return True  # a total map partitions by construction

    @cached_property
    def is_configuration(self) -> bool:
        return configuration_defect(self) is None

    @cached_property
    def is_coherent(self) -> bool:
        from .wl import check_coherent

        return check_coherent(self).coherent


def configuration_defect(c: Configuration) -> Optional[str]:
    """None when both configuration axioms hold, else a short reason.

    Axiom one: a color determines the equality pattern.  Axiom two: for
    every map of index positions, the rearranged tuple's color depends
    only on the original color.
    """
    pattern_of: dict[int, tuple[int, ...]] = {}
    tuples = list(all_tuples(c.gamma_size, c.k))
    for t, col in zip(tuples, c.colors):
        pat = equality_pattern(t)
        if pattern_of.setdefault(col, pat) != pat:
            return f"color {col} mixes equality patterns"
    for phi in all_tuples(c.k, c.k):
        induced: dict[int, int] = {}
        for t, col in zip(tuples, c.colors):
            moved = c.colors[c.rank_of(tuple(t[i] for i in phi))]
            if induced.setdefault(col, moved) != moved:
                return f"index map {phi} is not color-functional on color {col}"
    return None


def check_configuration(c: Configuration) -> bool:
    return configuration_defect(c) is None


# ---------------------------------------------------------------------------
# refinement stage one: membership data to a partition


def f1_refine(s: RelStructure) -> Configuration:
    """Color each tuple by (membership bit-string, equality pattern).

    Palette order: bit-strings descending by the number they spell,
    equality pattern as tie-break.  Tuples with repeated entries never
    share a color with repetition-free ones, even when a raw relation
    contains both.
    """
    rels = s.relations
    descs: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for t in all_tuples(s.gamma_size, s.k):
        bits = tuple(1 if t in rel else 0 for rel in rels)
        descs.append((bits, equality_pattern(t)))

    def natural_number(bits: tuple[int, ...]) -> int:
        n = 0
        for b in bits:
            n = (n << 1) | b
        return n

    ordered = sorted(
        set(descs), key=lambda d: (-natural_number(d[0]), d[1])
    )
    palette = Indexer(ordered)
    colors = tuple(palette.index(d) for d in descs)
    return Configuration(s.gamma_size, s.k, colors, palette)


# ---------------------------------------------------------------------------
# refinement stage two: partition to a configuration


def f2_config(p: Configuration) -> Configuration:
    """Refine by the color vector over every map of index positions.

    One pass suffices: rearranging by tau permutes the vector entries of
    the new description, so the result already satisfies both axioms.
    Verified anyway; failure is a bug.
    """
    if p.k < 1:
        raise StructureError("stage-two refinement needs positive arity")
    phis = list(all_tuples(p.k, p.k))
    descs = []
    for t in all_tuples(p.gamma_size, p.k):
        vector = tuple(
            p.colors[p.rank_of(tuple(t[i] for i in phi))] for phi in phis
        )
        descs.append((equality_pattern(t), vector))
    palette = Indexer(sorted(set(descs)))
    colors = tuple(palette.index(d) for d in descs)
    out = Configuration(p.gamma_size, p.k, colors, palette)
    defect = configuration_defect(out)
    if defect is not None:
        raise InternalInconsistency(f"stage-two output broke an axiom: {defect}")
    return out


# ---------------------------------------------------------------------------
# derived structures


def _reindexed(
    gamma_size: int, k: int, raw_colors: Sequence[int]
) -> Configuration:
    """Compress arbitrary color labels to 0..c-1, ordered by label; the
    old labels become the palette."""
    ordered = sorted(set(raw_colors))
    palette = Indexer(ordered)
    return Configuration(
        gamma_size, k, tuple(palette.index(c) for c in raw_colors), palette
    )


def skeleton(c: Configuration, l: int) -> Configuration:
    """The l-ary structure coloring (y_1..y_l) by the color of
    (y_1..y_l, y_l, ..., y_l); l = 0 is a reserved single color."""
    if l < 0 or l > c.k:
        raise StructureError(f"skeleton arity {l} outside 0..{c.k}")
    if l == c.k:
        return c
    if l == 0:
        return Configuration(c.gamma_size, 0, (0,), Indexer(("empty-tuple",)))
    raw = [
        c.color(t + (t[-1],) * (c.k - l)) for t in all_tuples(c.gamma_size, l)
    ]
    return _reindexed(c.gamma_size, l, raw)


def induced(c: Configuration, subset: Iterable[int]) -> Configuration:
    """Restriction of the coloring to tuples inside the subset."""
    points = sorted(set(subset))
    if not points:
        raise StructureError("cannot induce on an empty subset")
    if any(not 0 <= p < c.gamma_size for p in points):
        raise StructureError("subset leaves the ground set")
    raw = [
        c.color(tuple(points[i] for i in t))
        for t in all_tuples(len(points), c.k)
    ]
    return _reindexed(len(points), c.k, raw)


def restrict_by_tuple(c: Configuration, prefix: Sequence[int]) -> Configuration:
    """The (k-l)-ary coloring y ↦ c(prefix + y)."""
    l = len(prefix)
    if l >= c.k:
        raise StructureError("prefix must be shorter than the arity")
    if any(not 0 <= v < c.gamma_size for v in prefix):
        raise StructureError("prefix leaves the ground set")
    pre = tuple(prefix)
    raw = [c.color(pre + t) for t in all_tuples(c.gamma_size, c.k - l)]
    return _reindexed(c.gamma_size, c.k - l, raw)


# ---------------------------------------------------------------------------
# twins


def twin_classes_by_test(
    gamma_size: int, unchanged: Callable[[Permutation], bool]
) -> list[list[int]]:
    """Classes of the relation "swapping the two points changes nothing".

    Built from pairwise transposition tests; transitivity of the result is
    re-verified rather than assumed, since ``unchanged`` is caller-supplied.
    """
    parent = list(range(gamma_size))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def swap(a: int, b: int) -> Permutation:
        images = list(range(gamma_size))
        images[a], images[b] = b, a
        return Permutation(tuple(images))

    twin: dict[tuple[int, int], bool] = {}
    for a in range(gamma_size):
        for b in range(a + 1, gamma_size):
            twin[a, b] = unchanged(swap(a, b))
            if twin[a, b]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
    classes: dict[int, list[int]] = {}
    for p in range(gamma_size):
        classes.setdefault(find(p), []).append(p)
    out = sorted(classes.values())
    for cell in out:
        for a, b in itertools.combinations(cell, 2):
            if not twin[a, b]:
                raise InternalInconsistency(
                    f"twin relation is not transitive on {cell}"
                )
    return out


def twin_classes(c: Configuration) -> list[list[int]]:
    def unchanged(g: Permutation) -> bool:
        return c.permuted(g) == c

    return twin_classes_by_test(c.gamma_size, unchanged)


# ---------------------------------------------------------------------------
# group-orbit colorings


def orbital_configuration(gens: GenSet, k: int) -> Configuration:
    """Color Γ^k by the orbits of the coordinatewise group action; these
    colorings are always coherent."""
    n = gens.degree
    _check_cube(n, k)
    color_of: dict[tuple[int, ...], int] = {}
    raw_color = 0
    for t in all_tuples(n, k):
        if t in color_of:
            continue
        stack = [t]
        color_of[t] = raw_color
        while stack:
            cur = stack.pop()
            for g in gens:
                moved = tuple(g.images[v] for v in cur)
                if moved not in color_of:
                    color_of[moved] = raw_color
                    stack.append(moved)
        raw_color += 1
    raw = [color_of[t] for t in all_tuples(n, k)]
    return _reindexed(n, k, raw)


# ---------------------------------------------------------------------------
# file format


def parse_relstruct_file(text: str) -> RelStructure:
    """Structure file: "gamma k" then lines "color t1 .. tk"; colors are
    nonnegative and need not appear in order; '#' starts a comment."""
    rows: list[list[int]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append([int(tok) for tok in line.split()])
    if not rows or len(rows[0]) != 2:
        raise StructureError("structure file needs a 'gamma k' header line")
    gamma_size, k = rows[0]
    rels: dict[int, set[tuple[int, ...]]] = {}
    for row in rows[1:]:
        if len(row) != 1 + k:
            raise StructureError(f"expected 'color' plus {k} entries: {row}")
        color, t = row[0], tuple(row[1:])
        if color < 0:
            raise StructureError("negative color")
        rels.setdefault(color, set()).add(t)
    count = max(rels) + 1 if rels else 0
    relations = tuple(frozenset(rels.get(i, set())) for i in range(count))
    return RelStructure(gamma_size, k, relations)


def format_relstruct_file(s: RelStructure) -> str:
    lines = [f"{s.gamma_size} {s.k}"]
    for color, rel in enumerate(s.relations):
        for t in sorted(rel):
            lines.append(" ".join(str(v) for v in (color,) + t))
    return "\n".join(lines) + "\n"

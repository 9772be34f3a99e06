"""Analysis of 2-ary coherent colorings and subset schemes.

The classification half reads off the classical structure of a coherent
pair coloring: vertex classes, the graph of each edge color with its
components and degrees, and the primitivity flags.  The identification
half answers a concrete reconstruction question: given a coloring (or a
transitive group) promised to be the action on s-element subsets of an
m-element set, produce the m-set explicitly as a family of point sets.
Every identification is post-verified against the defining counting
invariants before it is returned, so a wrong promise yields an error,
never a wrong answer.

Design-counting bounds for uniform hypergraphs live here too, since they
share the subset-counting vocabulary.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Optional, Sequence

from .errors import InternalInconsistency
from .perm import GenSet, Homomorphism, Permutation, orbits
from .relstruct import Configuration, configuration_defect, orbital_configuration
from .wl import check_coherent


class SchemeError(ValueError):
    """Precondition violation or a failed, witnessed identification."""


# ---------------------------------------------------------------------------
# classical structure


class _DSU:
    def __init__(self, members: Iterable[int]):
        self.parent = {v: v for v in members}

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> tuple[tuple[int, ...], ...]:
        cells: dict[int, list[int]] = {}
        for v in self.parent:
            cells.setdefault(self.find(v), []).append(v)
        return tuple(tuple(sorted(cells[r])) for r in sorted(cells))


@dataclass(frozen=True)
class ColorGraph:
    """One edge color viewed as a digraph on its incident vertex classes."""

    color: int
    source_class: int
    target_class: int
    out_degree: int
    in_degree: int
    components: tuple[tuple[int, ...], ...]

    @property
    def connected(self) -> bool:
        return len(self.components) == 1


@dataclass(frozen=True)
class ClassicalSummary:
    homogeneous: bool
    vertex_classes: tuple[tuple[int, ...], ...]
    color_graphs: tuple[ColorGraph, ...]
    primitive: bool
    uniprimitive: bool
    trivial_clique: bool

    def graph_for(self, color: int) -> ColorGraph:
        for cg in self.color_graphs:
            if cg.color == color:
                return cg
        raise KeyError(color)


def vertex_classes_of(c: Configuration) -> tuple[tuple[int, ...], ...]:
    """Vertices grouped by diagonal color, ordered by that color."""
    by: dict[int, list[int]] = {}
    for v in range(c.gamma_size):
        by.setdefault(c.color((v, v)), []).append(v)
    return tuple(tuple(by[col]) for col in sorted(by))


def paired_color(c: Configuration, r: int) -> int:
    """The color of the reversed pairs of color r (well defined once the
    coloring is a configuration)."""
    for rank, col in enumerate(c.colors):
        if col == r:
            u, v = c.tuple_at(rank)
            return c.color((v, u))
    raise SchemeError(f"color {r} has an empty fiber")


def _require_coherent(c: Configuration, who: str) -> None:
    if c.k != 2:
        raise SchemeError(f"{who} needs a pair coloring, got arity {c.k}")
    defect = configuration_defect(c)
    if defect is not None:
        raise SchemeError(f"{who} needs a configuration: {defect}")
    report = check_coherent(c)
    if not report.coherent:
        w = report.witness
        raise SchemeError(
            f"{who} needs a coherent input; counts differ at "
            f"{w.x} vs {w.y} for vector {w.color_vector}"
        )


def classify_classical(c: Configuration) -> ClassicalSummary:
    """Vertex classes, per-color graph structure, and primitivity flags
    of a coherent pair coloring."""
    _require_coherent(c, "classification")
    classes = vertex_classes_of(c)
    class_index = {}
    for i, cell in enumerate(classes):
        for v in cell:
            class_index[v] = i

    graphs = []
    for color, pairs in sorted(c.fibers().items()):
        u0, v0 = pairs[0]
        if u0 == v0:
            continue
        src = class_index[u0]
        tgt = class_index[v0]
        outdeg = Counter(u for u, _ in pairs)
        indeg = Counter(v for _, v in pairs)
        if {class_index[u] for u, _ in pairs} != {src} or {
            class_index[v] for _, v in pairs
        } != {tgt}:
            raise InternalInconsistency(f"color {color} straddles vertex classes")
        d_out = {outdeg.get(u, 0) for u in classes[src]}
        d_in = {indeg.get(v, 0) for v in classes[tgt]}
        if len(d_out) != 1 or len(d_in) != 1:
            raise InternalInconsistency(
                f"degrees of color {color} vary despite coherence"
            )
        dsu = _DSU(set(classes[src]) | set(classes[tgt]))
        for u, v in pairs:
            dsu.union(u, v)
        components = dsu.groups()
        if src == tgt and len({len(comp) for comp in components}) != 1:
            raise InternalInconsistency(
                f"components of color {color} have unequal sizes"
            )
        graphs.append(
            ColorGraph(color, src, tgt, d_out.pop(), d_in.pop(), components)
        )

    homogeneous = len(classes) == 1
    primitive = homogeneous and all(cg.connected for cg in graphs)
    trivial_clique = homogeneous and c.num_colors == 2
    return ClassicalSummary(
        homogeneous=homogeneous,
        vertex_classes=classes,
        color_graphs=tuple(graphs),
        primitive=primitive,
        uniprimitive=primitive and not trivial_clique,
        trivial_clique=trivial_clique,
    )


# ---------------------------------------------------------------------------
# subset schemes


def johnson_scheme(m: int, s: int) -> Configuration:
    """The pair coloring of s-subsets of an m-set by symmetric-difference
    radius |S1 minus S2|; color 0 is the diagonal, color s the disjoint
    pairs."""
    if s < 2:
        raise SchemeError("subset size must be at least 2")
    if m < 2 * s + 1:
        raise SchemeError("ground set must have more than twice the subset size")
    verts = list(combinations(range(m), s))
    colors = []
    for a in verts:
        sa = set(a)
        for b in verts:
            colors.append(s - len(sa.intersection(b)))
    return Configuration(len(verts), 2, tuple(colors))


def subset_action(m: int, s: int, g: Permutation) -> Permutation:
    """The permutation a point map induces on s-subsets, in the same
    lexicographic vertex order johnson_scheme uses."""
    if g.degree != m:
        raise SchemeError(f"point map degree {g.degree} != {m}")
    verts = list(combinations(range(m), s))
    index = {v: i for i, v in enumerate(verts)}
    return Permutation(
        tuple(index[tuple(sorted(g.images[p] for p in v))] for v in verts)
    )


@dataclass(frozen=True)
class JohnsonId:
    """A verified isomorphism onto the s-subsets of an m-point set.

    lambda_sets are the recovered points, each given as the set of
    vertices whose subset contains it, labeled in least-vertex order;
    point_to_set sends each vertex to its s-set of point labels;
    color_to_intersection gives |iota(u) & iota(v)| per pair color.
    """

    m: int
    s: int
    lambda_sets: tuple[frozenset[int], ...]
    point_to_set: tuple[frozenset[int], ...]
    color_to_intersection: dict[int, int]


class _Reject(Exception):
    """One candidate reconstruction failed verification (internal)."""


def _candidate_lambda(
    gamma_size: int,
    upsilon_pairs: Sequence[tuple[int, int]],
    in_delta: Callable[[int, int], bool],
) -> list[frozenset[int]]:
    """The distinct sets C(x,y) over the chosen pairs, least-vertex order.

    For a pair (x,y): collect B = the vertices delta-related to y but not
    to x, then keep every vertex not delta-related to anything in B.
    """
    seen: dict[frozenset[int], None] = {}
    for x, y in upsilon_pairs:
        b_set = [
            z for z in range(gamma_size) if not in_delta(x, z) and in_delta(y, z)
        ]
        banned = bytearray(gamma_size)
        for z in b_set:
            for r in range(gamma_size):
                if in_delta(z, r):
                    banned[r] = 1
        seen.setdefault(frozenset(r for r in range(gamma_size) if not banned[r]))
    return sorted(seen, key=sorted)


def _verified_subset_map(
    c: Configuration, m: int, s: int, lambda_sets: Sequence[frozenset[int]]
) -> tuple[tuple[frozenset[int], ...], dict[int, int]]:
    """Check the defining invariants and return (iota, iota'); raises
    _Reject with a witness otherwise."""
    if len(lambda_sets) != m:
        raise _Reject(f"recovered {len(lambda_sets)} point sets, need {m}")
    iota = []
    for v in range(c.gamma_size):
        mem = frozenset(i for i, lam in enumerate(lambda_sets) if v in lam)
        if len(mem) != s:
            raise _Reject(f"vertex {v} lies in {len(mem)} point sets, need {s}")
        iota.append(mem)
    first_at: dict[frozenset[int], int] = {}
    for v, mem in enumerate(iota):
        if mem in first_at:
            raise _Reject(f"vertices {first_at[mem]} and {v} get the same subset")
        first_at[mem] = v
    # injective into the comb(m, s) subsets of equal total count: bijective
    iota_prime: dict[int, int] = {}
    for u in range(c.gamma_size):
        for v in range(c.gamma_size):
            col = c.color((u, v))
            val = len(iota[u] & iota[v])
            if iota_prime.setdefault(col, val) != val:
                raise _Reject(
                    f"pairs of color {col} disagree: |iota({u}) & iota({v})|"
                    f" = {val} != {iota_prime[col]}"
                )
    return tuple(iota), iota_prime


def _intersecting_families(
    c: Configuration, delta_color: int, want: int, call_cap: int = 200_000
) -> list[frozenset[int]]:
    """Maximal cliques of size `want` in the graph of pairs not colored
    delta_color; for a genuine subset scheme with delta = disjointness
    these are exactly the vertex stars of the ground points."""
    n = c.gamma_size
    adj = [
        {v for v in range(n) if v != u and c.color((u, v)) != delta_color}
        for u in range(n)
    ]
    out: list[frozenset[int]] = []
    calls = 0

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        nonlocal calls
        calls += 1
        if calls > call_cap:
            raise _Reject("clique search exceeded its call cap")
        if not p and not x:
            if len(r) == want:
                out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(set(), set(range(n)), set())
    return sorted(set(out), key=sorted)


def identify_johnson(c: Configuration, m: int, s: int) -> JohnsonId:
    """Reconstruct the m ground points of a pair coloring claimed to be
    the s-subset scheme, trying ordered color pairs as the (selector,
    disjointness) roles and post-verifying each candidate.

    The first candidate follows the size rule: selector = smallest
    off-diagonal class and disjointness = largest when m exceeds
    (s+1)^2 - 2, the two swapped otherwise; ties fall to the lower
    color.  If no ordered pair verifies, vertex stars are recovered
    directly as maximum cliques avoiding a guessed disjointness color.
    """
    if s < 2 or m < 2 * s + 1:
        raise SchemeError(f"no subset scheme has parameters m={m}, s={s}")
    if comb(m, s) != c.gamma_size:
        raise SchemeError(
            f"{c.gamma_size} vertices cannot be the {comb(m, s)} subsets"
            f" of an {m}-set"
        )
    _require_coherent(c, "subset identification")

    sizes = c.class_sizes()
    fibers = c.fibers()
    offdiag = [
        col
        for col, pairs in sorted(fibers.items())
        if pairs[0][0] != pairs[0][1]
    ]
    smallest = min(offdiag, key=lambda col: (sizes[col], col))
    largest = max(offdiag, key=lambda col: (sizes[col], -col))
    if m > (s + 1) ** 2 - 2:
        preferred = (smallest, largest)
    else:
        preferred = (largest, smallest)
    candidates = [preferred] + [
        (a, b) for a in offdiag for b in offdiag if (a, b) != preferred
    ]

    failures: list[str] = []
    for ups, delt in candidates:
        in_delta = lambda a, b, d=delt: c.color((a, b)) == d
        lams = _candidate_lambda(c.gamma_size, fibers[ups], in_delta)
        try:
            iota, iprime = _verified_subset_map(c, m, s, lams)
        except _Reject as r:
            failures.append(f"selector {ups} / disjointness {delt}: {r}")
            continue
        return JohnsonId(m, s, tuple(lams), iota, iprime)

    for delt in offdiag:
        try:
            lams = _intersecting_families(c, delt, comb(m - 1, s - 1))
            iota, iprime = _verified_subset_map(c, m, s, lams)
        except _Reject as r:
            failures.append(f"star recovery with disjointness {delt}: {r}")
            continue
        return JohnsonId(m, s, tuple(lams), iota, iprime)

    raise SchemeError(
        "no candidate yields a verified subset identification: "
        + "; ".join(failures)
    )


@dataclass(frozen=True)
class AltActionId:
    """A verified relabeling of a transitive action as the induced action
    on k-subsets of m points, with per-generator images on the points."""

    m: int
    k: int
    source: GenSet
    lambda_sets: tuple[frozenset[int], ...]
    point_to_set: tuple[frozenset[int], ...]
    generator_images: tuple[Permutation, ...]

    def action_hom(self) -> Homomorphism:
        return Homomorphism(self.source, list(self.generator_images), self.m)


def _equivariant_images(
    gens: GenSet,
    lams: Sequence[frozenset[int]],
    iota: Sequence[frozenset[int]],
) -> tuple[Permutation, ...]:
    """Per-generator permutations of the recovered points, checked for
    equivariance with iota at every vertex; raises _Reject otherwise."""
    lam_index = {lam: i for i, lam in enumerate(lams)}
    images = []
    for g in gens:
        imgs = []
        for lam in lams:
            moved = frozenset(g.images[v] for v in lam)
            if moved not in lam_index:
                raise _Reject(
                    "a generator does not permute the recovered point sets"
                )
            imgs.append(lam_index[moved])
        images.append(Permutation(tuple(imgs)))
    for g, gm in zip(gens, images):
        for w in range(g.degree):
            if iota[g.images[w]] != frozenset(gm.images[i] for i in iota[w]):
                raise _Reject(f"labeling is not equivariant at vertex {w}")
    return tuple(images)


def identify_alt_action(gens: GenSet, m: int, k: int) -> AltActionId:
    """Recover the hidden m points of a transitive group promised to act
    as on k-subsets, from a pair of its orbitals on ordered vertex pairs.

    Orbital roles follow the same size rule and sweep as
    identify_johnson; every candidate is verified both by subset
    counting and by equivariance of the labeling on all generators and
    vertices before being accepted.
    """
    n = gens.degree
    if k < 1:
        raise SchemeError("subset size must be positive")
    if comb(m, k) != n:
        raise SchemeError(
            f"degree {n} is not the number of {k}-subsets of {m} points"
        )
    if len(orbits(gens)) != 1:
        raise SchemeError("transitive action required")

    cfg = orbital_configuration(gens, 2)
    sizes = cfg.class_sizes()
    fibers = cfg.fibers()
    offdiag = [
        col
        for col, pairs in sorted(fibers.items())
        if pairs[0][0] != pairs[0][1]
    ]
    smallest = min(offdiag, key=lambda col: (sizes[col], col))
    largest = max(offdiag, key=lambda col: (sizes[col], -col))
    if m > (k + 1) ** 2 - 2:
        preferred = (smallest, largest)
    else:
        preferred = (largest, smallest)
    candidates = [preferred] + [
        (a, b) for a in offdiag for b in offdiag if (a, b) != preferred
    ]

    failures: list[str] = []
    for ups, delt in candidates:
        in_delta = lambda a, b, d=delt: cfg.color((a, b)) == d
        lams = _candidate_lambda(n, fibers[ups], in_delta)
        try:
            iota, _ = _verified_subset_map(cfg, m, k, lams)
            images = _equivariant_images(gens, lams, iota)
        except _Reject as r:
            failures.append(f"orbitals {ups}/{delt}: {r}")
            continue
        return AltActionId(m, k, gens, tuple(lams), iota, images)
    raise SchemeError(
        "no orbital pair yields a verified subset action: "
        + "; ".join(failures)
    )


# ---------------------------------------------------------------------------
# designs


@dataclass(frozen=True)
class DesignCheck:
    """Exhaustive t-subset count over a uniform hypergraph plus the
    counting bounds that follow when it is a design.

    fisher_ok covers b >= v for pair designs with block size below v;
    subset_bound_ok covers b >= C(v, j) for j up to min(t/2, v - u).
    Both are vacuously true when not applicable.
    """

    v: int
    u: int
    t: int
    b: int
    lam: Optional[int]
    is_t_design: bool
    fisher_ok: bool
    subset_bound_ok: bool


def check_design(v: int, edges: Sequence[Iterable[int]], t: int) -> DesignCheck:
    """Count every t-subset's occurrences across the edges of a u-uniform
    hypergraph on v labeled vertices and test the design bounds."""
    if v < 1 or t < 1:
        raise SchemeError("need at least one vertex and a positive t")
    blocks = [tuple(sorted(e)) for e in edges]
    if not blocks:
        raise SchemeError("need at least one edge")
    u = len(blocks[0])
    for e in blocks:
        if len(e) != u or len(set(e)) != u:
            raise SchemeError(f"edges must be uniform without repeats: {e}")
        if e and (e[0] < 0 or e[-1] >= v):
            raise SchemeError(f"edge {e} leaves the vertex range")
    b = len(blocks)

    counts: Counter[tuple[int, ...]] = Counter()
    for e in blocks:
        for sub in combinations(e, min(t, u)):
            counts[sub] += 1
    lam: Optional[int] = None
    is_design = t <= u and len(counts) == comb(v, t)
    if is_design:
        values = set(counts.values())
        is_design = len(values) == 1
        if is_design:
            lam = values.pop()
            if Fraction(lam * comb(v, t), comb(u, t)) != b:
                raise InternalInconsistency(
                    "edge count contradicts the design counting identity"
                )

    fisher_ok = True
    if is_design and t == 2 and u < v:
        fisher_ok = b >= v
    subset_ok = True
    if is_design:
        j_max = min(t // 2, v - u)
        subset_ok = all(b >= comb(v, j) for j in range(1, j_max + 1))
    return DesignCheck(v, u, t, b, lam, is_design, fisher_ok, subset_ok)


def incidence_configuration(
    v: int, blocks: Sequence[Iterable[int]], split_sides: bool = False
) -> Configuration:
    """The pair coloring of points-then-blocks by incidence: diagonal,
    same-side off-diagonal, belongs (either direction), and neither.
    With split_sides each of the four kinds is split by the side of the
    source vertex, giving eight colors."""
    sets = [frozenset(b) for b in blocks]
    n = v + len(sets)
    plain = {"V": 0, "W": 1, "B": 2, "D": 3}
    split = {
        name: i
        for i, name in enumerate(
            ["Vp", "Vb", "Wp", "Wb", "Bp", "Bb", "Dp", "Db"]
        )
    }

    def name(x: int, y: int) -> str:
        xp, yp = x < v, y < v
        side = "p" if xp else "b"
        if x == y:
            return "V" + side if split_sides else "V"
        if xp == yp:
            return "W" + side if split_sides else "W"
        point, block = (x, y - v) if xp else (y, x - v)
        inc = point in sets[block]
        if not split_sides:
            return "B" if inc else "D"
        return ("B" if inc else "D") + side

    table = split if split_sides else plain
    colors = tuple(table[name(x, y)] for x in range(n) for y in range(n))
    return Configuration(n, 2, colors)


def search_2_designs(
    v: int, u: int, lam: int
) -> list[tuple[tuple[int, ...], ...]]:
    """All pair designs with the given parameters and distinct blocks, as
    lexicographically sorted block tuples.  Brute force with pair-count
    pruning; the space is capped at v <= 10, u <= 5."""
    if v > 10 or u > 5:
        raise SchemeError("search space capped at v <= 10, u <= 5")
    if not (2 <= u <= v) or lam < 1:
        raise SchemeError("need 2 <= u <= v and a positive pair count")
    b_times = Fraction(lam * comb(v, 2), comb(u, 2))
    r_times = Fraction(lam * (v - 1), u - 1)
    if b_times.denominator != 1 or r_times.denominator != 1:
        return []
    b_target = int(b_times)

    blocks = list(combinations(range(v), u))
    pair_index = {p: i for i, p in enumerate(combinations(range(v), 2))}
    covers = [
        tuple(pair_index[p] for p in combinations(bl, 2)) for bl in blocks
    ]
    n_pairs = len(pair_index)
    counts = [0] * n_pairs
    chosen: list[int] = []
    found: list[tuple[tuple[int, ...], ...]] = []

    def least_deficient() -> int:
        for p in range(n_pairs):
            if counts[p] < lam:
                return p
        return -1

    def extend(start: int) -> None:
        if len(chosen) == b_target:
            if least_deficient() == -1:
                found.append(tuple(blocks[i] for i in chosen))
            return
        p = least_deficient()
        if p == -1:
            return
        # the least deficient pair must gain coverage from blocks >= start
        room = sum(
            1 for i in range(start, len(blocks)) if p in covers[i]
        )
        if room < lam - counts[p]:
            return
        for i in range(start, len(blocks)):
            if any(counts[q] >= lam for q in covers[i]):
                continue
            for q in covers[i]:
                counts[q] += 1
            chosen.append(i)
            extend(i + 1)
            chosen.pop()
            for q in covers[i]:
                counts[q] -= 1

    extend(0)
    return found


# ---------------------------------------------------------------------------
# semiregularity


@dataclass(frozen=True)
class SemiregularReport:
    """Bipartite degree regularity over a pair coloring; failures carry a
    witness and indict coherence rather than raise."""

    cross_failures: tuple[str, ...]
    contracted_failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.cross_failures and not self.contracted_failures


def _constant_degrees(
    side: Sequence[int], degree: Counter, what: str
) -> Optional[str]:
    values = {v: degree.get(v, 0) for v in side}
    distinct = set(values.values())
    if len(distinct) > 1:
        lo = min(values, key=lambda v: values[v])
        hi = max(values, key=lambda v: values[v])
        return f"{what}: degree {values[lo]} at {lo} but {values[hi]} at {hi}"
    return None


def semiregular_checks(c: Configuration) -> SemiregularReport:
    """Degree constancy of every cross-class color on both sides, and of
    every contraction of a cross color along the components of an
    intra-class color on its target side."""
    if c.k != 2:
        raise SchemeError(f"semiregularity needs a pair coloring, got arity {c.k}")
    classes = vertex_classes_of(c)
    class_index = {}
    for i, cell in enumerate(classes):
        for v in cell:
            class_index[v] = i

    cross: list[str] = []
    contracted: list[str] = []
    fibers = c.fibers()
    intra: dict[int, list[tuple[int, list[tuple[int, int]]]]] = {}
    cross_colors: list[tuple[int, int, int, list[tuple[int, int]]]] = []
    for color, pairs in sorted(fibers.items()):
        u0, v0 = pairs[0]
        if u0 == v0:
            continue
        src_set = {class_index[u] for u, _ in pairs}
        tgt_set = {class_index[v] for _, v in pairs}
        if len(src_set) != 1 or len(tgt_set) != 1:
            cross.append(f"color {color} straddles vertex classes")
            continue
        src, tgt = src_set.pop(), tgt_set.pop()
        if src == tgt:
            intra.setdefault(src, []).append((color, pairs))
        else:
            cross_colors.append((color, src, tgt, pairs))

    for color, src, tgt, pairs in cross_colors:
        out = Counter(u for u, _ in pairs)
        inn = Counter(v for _, v in pairs)
        w = _constant_degrees(classes[src], out, f"color {color} out-side")
        if w:
            cross.append(w)
        w = _constant_degrees(classes[tgt], inn, f"color {color} in-side")
        if w:
            cross.append(w)

    for color, src, tgt, pairs in cross_colors:
        for red, red_pairs in intra.get(tgt, []):
            dsu = _DSU(classes[tgt])
            for a, bb in red_pairs:
                dsu.union(a, bb)
            comp_of = {}
            for ci, cell in enumerate(dsu.groups()):
                for y in cell:
                    comp_of[y] = ci
            incident: set[tuple[int, int]] = set()
            for x, y in pairs:
                incident.add((x, comp_of[y]))
            out = Counter(x for x, _ in incident)
            inn = Counter(i for _, i in incident)
            tag = f"color {color} contracted along color {red}"
            w = _constant_degrees(classes[src], out, f"{tag}, source side")
            if w:
                contracted.append(w)
            w = _constant_degrees(
                range(len(dsu.groups())), inn, f"{tag}, component side"
            )
            if w:
                contracted.append(w)

    return SemiregularReport(tuple(cross), tuple(contracted))


def pointed_semiregular_witness(
    c: Configuration, y: int, aqua: int, beige: int, cyan: int
) -> Optional[str]:
    """For the two in-neighborhoods of y under colors aqua and beige, the
    cyan pairs between them should form a semiregular bipartite graph;
    returns a witness line when they do not."""
    left = [x for x in range(c.gamma_size) if c.color((x, y)) == aqua]
    right = [z for z in range(c.gamma_size) if c.color((z, y)) == beige]
    out = Counter()
    inn = Counter()
    for x in left:
        for z in right:
            if c.color((x, z)) == cyan:
                out[x] += 1
                inn[z] += 1
    tag = f"neighborhoods of {y} under {aqua}/{beige} joined by {cyan}"
    w = _constant_degrees(left, out, f"{tag}, left")
    if w:
        return w
    return _constant_degrees(right, inn, f"{tag}, right")

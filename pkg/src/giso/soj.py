"""Split-or-johnson: reduce a uniprimitive pair coloring to either a
colored partition with no large part or an identified subset scheme on
most of the ground set.

Every outcome self-verifies, and every non-canonical choice made along
the way is written to a ledger: the points fixed, the size of the choice
set each came from, and the resulting index bound for the stabilizer the
outcome is canonical for.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import InternalInconsistency, ResourceLimitExceeded
from .relstruct import (
    Configuration,
    RelStructure,
    all_tuples,
    configuration_defect,
    f1_refine,
    f2_config,
    induced,
    restrict_by_tuple,
    skeleton,
    twin_classes,
)
from .schemes import (
    JohnsonId,
    SchemeError,
    classify_classical,
    identify_johnson,
    pointed_semiregular_witness,
    paired_color,
    vertex_classes_of,
)
from .wl import check_coherent, wl


class SplitError(ValueError):
    """A precondition of the splitting layer does not hold."""


# left sides this small are memorized point by point
_BASE_CAP = 12
# arities beyond this abort rather than approximate
_ARITY_CAP = 4
_DEPTH_CAP = 64


def _ratio(value, low: Fraction, who: str) -> Fraction:
    r = Fraction(value)
    if not low <= r < 1:
        raise SplitError(f"{who} needs a ratio in [{low}, 1), got {r}")
    return r


def small_right_side(n1: int) -> int:
    """Right sides up to this size may simply be fixed pointwise; the
    factorial cost stays inside the index budget."""
    return int((6 * math.log2(max(n1, 2))) ** 1.5)


# ---------------------------------------------------------------------------
# colored partitions


@dataclass(frozen=True)
class ColoredPartition:
    """A coloring of a vertex set, each color class cut into equal parts.

    A class kept whole is stored as its own single part, whatever its
    size; a class that is genuinely subdivided must use parts of at
    least two vertices.  color_keys carries the provenance of each color
    and is ignored by equality.
    """

    domain: tuple[int, ...]
    vertex_color: tuple[int, ...]
    cells: tuple[tuple[tuple[int, ...], ...], ...]
    color_keys: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        dom = self.domain
        if list(dom) != sorted(set(dom)):
            raise SplitError("domain must be strictly increasing")
        if len(self.vertex_color) != len(dom):
            raise SplitError("one color per domain vertex")
        ncol = len(self.cells)
        if set(self.vertex_color) != set(range(ncol)):
            raise SplitError("colors must be exactly 0..c-1 and all used")
        for color, parts in enumerate(self.cells):
            members = sorted(
                v for v, k in zip(dom, self.vertex_color) if k == color
            )
            listed = sorted(v for part in parts for v in part)
            if listed != members:
                raise SplitError(f"parts of color {color} do not tile its class")
            sizes = {len(part) for part in parts}
            if len(sizes) != 1:
                raise SplitError(f"parts of color {color} differ in size")
            if len(parts) > 1 and min(sizes) < 2:
                raise SplitError(
                    f"color {color} is subdivided into single vertices"
                )

    def class_of(self, color: int) -> tuple[int, ...]:
        return tuple(
            v for v, k in zip(self.domain, self.vertex_color) if k == color
        )

    def part_sizes(self) -> tuple[int, ...]:
        return tuple(len(part) for parts in self.cells for part in parts)

    def alpha_defects(self, alpha: Fraction, total: Optional[int] = None) -> tuple[str, ...]:
        """Parts larger than alpha times the ground set size."""
        n = len(self.domain) if total is None else total
        out = []
        for parts in self.cells:
            for part in parts:
                if Fraction(len(part)) > alpha * n:
                    out.append(f"part {part} exceeds {alpha} of {n}")
        return tuple(out)


def _build_partition(groups) -> ColoredPartition:
    """groups: (sort key, members, parts or None); None keeps the class
    whole.  Colors are numbered by ascending key."""
    ordered = sorted(groups, key=lambda g: g[0])
    domain = sorted(v for _, members, _ in ordered for v in members)
    index = {v: i for i, v in enumerate(domain)}
    vertex_color = [0] * len(domain)
    cells = []
    keys = []
    for color, (key, members, parts) in enumerate(ordered):
        for v in members:
            vertex_color[index[v]] = color
        if parts is None:
            cells.append((tuple(sorted(members)),))
        else:
            cells.append(tuple(sorted(tuple(sorted(p)) for p in parts)))
        keys.append(key)
    return ColoredPartition(
        tuple(domain), tuple(vertex_color), tuple(cells), tuple(keys)
    )


# ---------------------------------------------------------------------------
# outcomes and their ledgers


@dataclass(frozen=True)
class SoJOutcome:
    """A colored partition or an identified subset scheme, plus the
    canonicity ledger that paid for it.

    stabilized lists the points fixed, in order; multiplicities gives the
    size of the choice set each point was drawn from, so index_cost
    bounds the index of the stabilizer subgroup the outcome is canonical
    for.  For a johnson outcome the scheme lives on support, and vertex
    indices inside the identification refer to positions in support.
    """

    kind: str
    partition: Optional[ColoredPartition]
    johnson: Optional[JohnsonId]
    support: tuple[int, ...]
    stabilized: tuple[int, ...]
    multiplicities: tuple[int, ...]
    index_cost: int
    trace: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("partition", "johnson"):
            raise SplitError(f"unknown outcome kind {self.kind!r}")
        if (self.kind == "partition") != (self.partition is not None):
            raise SplitError("partition payload does not match the kind")
        if (self.kind == "johnson") != (self.johnson is not None):
            raise SplitError("johnson payload does not match the kind")
        if len(self.stabilized) != len(self.multiplicities):
            raise SplitError("one multiplicity per stabilized point")
        if any(m < 1 for m in self.multiplicities):
            raise SplitError("choice sets are never empty")
        if self.index_cost != math.prod(self.multiplicities):
            raise SplitError("index_cost must be the product of the choices")


def johnson_id_defects(jid: JohnsonId, nverts: int) -> tuple[str, ...]:
    """Direct re-verification of a subset identification covering all
    s-subsets of an m-point set."""
    out = []
    m, s = jid.m, jid.s
    if m < 2 * s:
        out.append(f"m={m} too small for subset size {s}")
    if len(jid.lambda_sets) != m:
        out.append(f"{len(jid.lambda_sets)} point sets for m={m}")
    if len(jid.point_to_set) != nverts:
        out.append("one subset per vertex is required")
    if nverts != comb(m, s):
        out.append(f"{nverts} vertices cannot carry all {comb(m, s)} subsets")
    if any(len(ps) != s for ps in jid.point_to_set):
        out.append("subset sizes are not uniform")
    if len(set(jid.point_to_set)) != len(jid.point_to_set):
        out.append("two vertices share a subset")
    for j, lam in enumerate(jid.lambda_sets):
        star = frozenset(
            v for v, ps in enumerate(jid.point_to_set) if j in ps
        )
        if star != lam:
            out.append(f"point {j} disagrees with the vertices listing it")
            break
    return tuple(out)


def outcome_defects(
    out: SoJOutcome, domain: Sequence[int], alpha: Fraction
) -> tuple[str, ...]:
    """Re-verify an outcome against the ground set it claims to split."""
    dom = tuple(sorted(domain))
    problems: list[str] = []
    if out.kind == "partition":
        part = out.partition
        if part.domain != dom:
            problems.append("partition does not cover the ground set")
        problems.extend(part.alpha_defects(alpha, len(dom)))
    else:
        if not set(out.support) <= set(dom):
            problems.append("support leaves the ground set")
        if Fraction(len(out.support)) < alpha * len(dom):
            problems.append(
                f"support {len(out.support)} below {alpha} of {len(dom)}"
            )
        problems.extend(johnson_id_defects(out.johnson, len(out.support)))
    return tuple(problems)


def _check_index_budget(cost: int, n: int) -> None:
    # the stabilizer index must stay quasipolynomial in the ground set
    if n >= 2 and cost > 1:
        if cost.bit_length() - 1 > 4 * math.log2(n) ** 2:
            raise InternalInconsistency(
                f"index cost {cost} breaches the n^(4 log n) budget at n={n}"
            )


class _Ledger:
    __slots__ = ("points", "mults", "trace")

    def __init__(self):
        self.points: list[int] = []
        self.mults: list[int] = []
        self.trace: list[str] = []

    def choose(self, point: int, setsize: int, what: str) -> None:
        self.points.append(point)
        self.mults.append(setsize)
        self.trace.append(f"fixed {what} {point} out of {setsize} candidates")

    def note(self, msg: str) -> None:
        self.trace.append(msg)

    def absorb(self, points, mults, trace) -> None:
        self.points.extend(points)
        self.mults.extend(mults)
        self.trace.extend(trace)

    def cost(self) -> int:
        return math.prod(self.mults)


# ---------------------------------------------------------------------------
# bipartite graphs


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices 0..n1-1, right vertices 0..n2-1, edges left-to-right."""

    n1: int
    n2: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 0:
            raise SplitError("sides must be nonempty and nonnegative")
        for u, w in self.edges:
            if not (0 <= u < self.n1 and 0 <= w < self.n2):
                raise SplitError(f"edge ({u}, {w}) leaves the vertex ranges")

    def neighborhoods(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.n1)]
        for u, w in self.edges:
            adj[u].add(w)
        return tuple(frozenset(s) for s in adj)

    def left_degrees(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.neighborhoods())

    def right_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n2
        for _, w in self.edges:
            deg[w] += 1
        return tuple(deg)


def _twin_groups(verts: Sequence[int], adj) -> list[tuple[int, ...]]:
    """Vertices grouped by identical neighborhoods, largest group first
    broken by least member."""
    rows: dict[frozenset[int], list[int]] = {}
    for v in verts:
        rows.setdefault(frozenset(adj[v]), []).append(v)
    groups = [tuple(sorted(g)) for g in rows.values()]
    return sorted(groups, key=lambda g: (-len(g), g))


def _side_acceptable(verts: Sequence[int], adj, side: frozenset[int]) -> bool:
    # no class of >= |verts|/2 + 1 twins once edges are cut down to side
    rows = Counter(frozenset(adj[v]) & side for v in verts)
    return all(2 * size <= len(verts) + 1 for size in rows.values())


# ---------------------------------------------------------------------------
# the design lemma


@dataclass(frozen=True)
class DesignLemmaOutcome:
    """Either a prefix whose vertex coloring has no dominant color, or a
    prefix with a dominant class carrying a nontrivial pair coloring.

    coloring is the arity-1 view after fixing the prefix.  In the
    non_clique case, restriction is the pair coloring induced on
    dominant_class, relabeled to 0..|C|-1 in ascending vertex order.
    """

    case: str
    prefix: tuple[int, ...]
    coloring: Configuration
    dominant_class: Optional[tuple[int, ...]] = None
    restriction: Optional[Configuration] = None


def _need_coherent(c: Configuration, who: str) -> None:
    defect = configuration_defect(c)
    if defect is not None:
        raise SplitError(f"{who} needs a configuration: {defect}")
    report = check_coherent(c)
    if not report.coherent:
        w = report.witness
        raise SplitError(
            f"{who} needs a coherent input; counts differ at "
            f"{w.x} vs {w.y} for vector {w.color_vector}"
        )


def _need_classical(c: Configuration, who: str) -> None:
    if c.k != 2:
        raise SplitError(f"{who} needs a pair coloring, got arity {c.k}")
    _need_coherent(c, who)


def design_lemma(c: Configuration, alpha) -> DesignLemmaOutcome:
    """Search prefixes in canonical order until one either kills every
    dominant color or exposes a dominant class that is not a clique.

    Coherence promises a hit; running out of prefixes is a bug, not a
    verdict.
    """
    alpha = _ratio(alpha, Fraction(1, 2), "design_lemma")
    n, k = c.gamma_size, c.k
    if not 2 <= k or 2 * k > n:
        raise SplitError(f"arity {k} outside 2..{n}/2")
    _need_coherent(c, "design_lemma")
    for cls in twin_classes(c):
        if Fraction(len(cls)) > alpha * n:
            raise SplitError(
                f"twin class of {len(cls)} exceeds {alpha} of {n}"
            )

    for ell in range(k):
        for prefix in all_tuples(n, ell):
            sub = restrict_by_tuple(c, prefix) if ell else c
            one = skeleton(sub, 1)
            dominant = [
                col
                for col, size in enumerate(one.class_sizes())
                if Fraction(size) >= alpha * n
            ]
            if not dominant:
                return DesignLemmaOutcome("no_dominant", prefix, one)
            if ell <= k - 2:
                two = skeleton(sub, 2)
                for col in dominant:
                    members = [
                        v for v in range(n) if one.colors[v] == col
                    ]
                    if len(members) < 2:
                        continue
                    res = induced(two, members)
                    if res.num_colors > 2:
                        return DesignLemmaOutcome(
                            "non_clique", prefix, one, tuple(members), res
                        )
    raise InternalInconsistency(
        "every prefix kept a dominant clique; the input cannot have been "
        "coherent with small twin classes"
    )


def large_clique_twin_check(c: Configuration, cls: Iterable[int]) -> bool:
    """Whether the members of a large class are mutually twins.

    When the class induces a clique the answer must be yes; a coherent
    input that says otherwise is broken, and we refuse to continue.
    """
    _need_classical(c, "large_clique_twin_check")
    members = sorted(set(cls))
    n = c.gamma_size
    if any(not 0 <= v < n for v in members):
        raise SplitError("class leaves the ground set")
    if 2 * len(members) < n:
        raise SplitError(f"class of {len(members)} is below half of {n}")
    mset = set(members)
    twins = any(mset <= set(t) for t in twin_classes(c))
    if len(members) > 1:
        clique = induced(c, members).num_colors <= 2
        if clique and not twins:
            raise InternalInconsistency(
                "a large clique class must be a twin class"
            )
    return twins


# ---------------------------------------------------------------------------
# coherent split


@dataclass(frozen=True)
class CoherentSplit:
    """Result of splitting a two-class coherent configuration: a colored
    partition of the large side, or a smaller bipartite graph between
    subsets of the two sides."""

    kind: str
    partition: Optional[ColoredPartition]
    v1: tuple[int, ...]
    v2: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    y: Optional[int]
    stabilized: tuple[int, ...]
    multiplicities: tuple[int, ...]
    index_cost: int
    trace: tuple[str, ...]


def _cross_degrees(c: Configuration, c1, c2) -> dict[int, int]:
    """Per cross color, the count of left endpoints seen from any right
    vertex; constancy over the right side is an axiom here."""
    per_w = []
    for w in c2:
        counts = Counter(c.color((x, w)) for x in c1)
        per_w.append(counts)
    if any(counts != per_w[0] for counts in per_w[1:]):
        raise InternalInconsistency(
            "cross color degrees vary over the small side"
        )
    return dict(per_w[0])


def _color_twin_classes(c: Configuration, c1, c2, brown: int) -> list[tuple[int, ...]]:
    """Twin classes of the left side in the one-color bipartite graph,
    computed from one representative pair per left color and checked
    against the direct row comparison."""
    rows = {x: frozenset(w for w in c2 if c.color((x, w)) == brown) for x in c1}
    verdict: dict[int, bool] = {}
    for x in c1:
        for y in c1:
            if x >= y:
                continue
            col = c.color((x, y))
            same = rows[x] == rows[y]
            if col not in verdict:
                verdict[col] = same
            elif verdict[col] != same:
                raise InternalInconsistency(
                    f"pair color {col} cannot decide twin status over "
                    f"color {brown}"
                )
    groups: dict[frozenset[int], list[int]] = {}
    for x in c1:
        groups.setdefault(rows[x], []).append(x)
    direct = sorted(tuple(sorted(g)) for g in groups.values())
    merged = _merge_by_verdict(c1, c, verdict)
    if merged != direct:
        raise InternalInconsistency(
            "color-driven twin classes disagree with the row comparison"
        )
    return direct


def _merge_by_verdict(c1, c: Configuration, verdict) -> list[tuple[int, ...]]:
    parent = {x: x for x in c1}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in c1:
        for y in c1:
            if x < y and verdict.get(c.color((x, y)), False):
                parent[find(x)] = find(y)
    groups: dict[int, list[int]] = {}
    for x in c1:
        groups.setdefault(find(x), []).append(x)
    return sorted(tuple(sorted(g)) for g in groups.values())


def _refine_partitions(parts_a, parts_b) -> list[tuple[int, ...]]:
    out = []
    for a in parts_a:
        for b in parts_b:
            common = sorted(set(a) & set(b))
            if common:
                out.append(tuple(common))
    return sorted(out)


def _reddest_blocks(c: Configuration, members) -> Optional[list[tuple[int, ...]]]:
    """Blocks of the least disconnected color inside one class, as
    ambient labels; None when every color is connected."""
    sub = induced(c, members)
    summary = classify_classical(sub)
    labels = sorted(members)
    for cg in sorted(summary.color_graphs, key=lambda g: g.color):
        if not cg.connected:
            blocks = [
                tuple(labels[i] for i in comp) for comp in cg.components
            ]
            sizes = {len(b) for b in blocks}
            if len(sizes) != 1 or min(sizes) < 2:
                raise InternalInconsistency(
                    "a disconnected color must cut the class evenly"
                )
            return sorted(blocks)
    return None


def coherent_soj(c: Configuration) -> CoherentSplit:
    """Split a coherent configuration on two unequal vertex classes.

    Returns a colored partition of the large side with parts at most
    half of it, or a bipartite graph on subsets of the two sides whose
    right side lost at least half its points, with small twin classes.
    """
    _need_classical(c, "coherent_soj")
    classes = vertex_classes_of(c)
    if len(classes) != 2:
        raise SplitError(
            f"coherent_soj needs exactly two vertex classes, got {len(classes)}"
        )
    a, b = classes
    if len(a) == len(b):
        raise SplitError("the two sides must differ in size")
    c1, c2 = (a, b) if len(a) > len(b) else (b, a)
    cross = {c.color((x, w)) for x in c1 for w in c2}
    if len(cross) < 2:
        raise SplitError("the cross coloring is constant")
    if induced(c, c2).num_colors <= 2:
        raise SplitError("the small side is a clique")

    led = _Ledger()
    if induced(c, c1).num_colors <= 2:
        # a clique large side would force an incomplete balanced design
        # with more points than blocks
        raise InternalInconsistency(
            "the large side of a coherent two-class configuration "
            "cannot be a clique"
        )

    blocks1 = _reddest_blocks(c, c1)
    if blocks1 is not None:
        led.note(
            f"large side split by its least disconnected color into "
            f"{len(blocks1)} blocks"
        )
        part = _build_partition([((0,), list(c1), blocks1)])
        return _finish_coherent(c, c1, c2, "partition", part, None, None, None, None, led)

    summary2 = classify_classical(induced(c, c2))
    if summary2.primitive:
        return _coherent_primitive(c, c1, c2, led)
    return _coherent_imprimitive(c, c1, c2, led)


def _coherent_primitive(c, c1, c2, led) -> CoherentSplit:
    y = min(c2)
    led.choose(y, len(c2), "anchor point")
    degrees = _cross_degrees(c, c1, c2)
    heavy = [k for k, d in degrees.items() if 2 * d > len(c1)]
    if not heavy:
        groups = {}
        for x in c1:
            groups.setdefault(c.color((x, y)), []).append(x)
        part = _build_partition(
            [((col,), members, None) for col, members in groups.items()]
        )
        led.note("every cross color reaches at most half the large side")
        return _finish_coherent(c, c1, c2, "partition", part, None, None, None, y, led)

    violet = heavy[0]
    v1 = tuple(sorted(x for x in c1 if c.color((x, y)) == violet))
    inner = sorted({c.color((u, w)) for u in c2 for w in c2 if u != w})
    light = [
        col
        for col in inner
        if 2 * sum(1 for w in c2 if c.color((w, y)) == col) < len(c2)
    ]
    if not light:
        raise InternalInconsistency(
            "a non-clique small side must have a light color"
        )
    blue = light[-1]
    led.note(f"majority cross color {violet}, light inner color {blue}")
    v2 = tuple(sorted(w for w in c2 if c.color((w, y)) == blue))
    edges = frozenset(
        (x, w) for x in v1 for w in v2 if c.color((x, w)) == violet
    )
    witness = pointed_semiregular_witness(c, y, violet, blue, violet)
    if witness is not None:
        raise InternalInconsistency(f"anchored bipartite not semiregular: {witness}")
    return _finish_coherent(c, c1, c2, "bipartite", None, v1, v2, edges, y, led)


def _coherent_imprimitive(c, c1, c2, led) -> CoherentSplit:
    blocks = _reddest_blocks(c, c2)
    if blocks is None:
        raise InternalInconsistency("imprimitive side lost its blocks")
    m = len(blocks)
    if 2 * m > len(c2):
        raise InternalInconsistency("blocks of size >= 2 cannot outnumber half")

    # every cross color must already separate the large side completely
    full = [tuple(sorted(x for x in c1))]
    for brown in sorted({c.color((x, w)) for x in c1 for w in c2}):
        full = _refine_partitions(full, _color_twin_classes(c, c1, c2, brown))
    if any(len(g) > 1 for g in full):
        raise InternalInconsistency(
            "a primitive large side cannot carry cross twins"
        )

    degrees = _cross_degrees(c, c1, c2)
    heavy = [k for k, d in degrees.items() if 2 * d > len(c1)]
    if not heavy:
        w = min(c2)
        led.choose(w, len(c2), "reference point")
        groups = {}
        for x in c1:
            groups.setdefault(c.color((x, w)), []).append(x)
        part = _build_partition(
            [((col,), members, None) for col, members in groups.items()]
        )
        return _finish_coherent(c, c1, c2, "partition", part, None, None, None, w, led)

    violet = heavy[0]
    acceptable = []
    for i, block in enumerate(blocks):
        rows = Counter(
            frozenset(w for w in block if c.color((x, w)) == violet) for x in c1
        )
        if all(2 * size <= len(c1) for size in rows.values()):
            acceptable.append(i)
    if acceptable:
        setsize = sum(len(blocks[i]) for i in acceptable)
        i0 = acceptable[0]
        y = min(blocks[i0])
        led.choose(y, setsize, "block anchor")
        v1 = tuple(sorted(c1))
        v2 = tuple(sorted(blocks[i0]))
        edges = frozenset(
            (x, w) for x in v1 for w in v2 if c.color((x, w)) == violet
        )
        return _finish_coherent(c, c1, c2, "bipartite", None, v1, v2, edges, y, led)

    # all blocks are saturated by the majority color; contract them onto
    # their least members and join by any other cross color
    others = sorted(k for k in degrees if k != violet)
    if not others:
        raise InternalInconsistency("a second cross color must exist")
    green = others[0]
    led.note(
        f"all {m} blocks saturated by color {violet}; contracted onto "
        f"anchors joined by color {green}"
    )
    anchors = tuple(sorted(min(block) for block in blocks))
    anchor_of = {min(block): block for block in blocks}
    edges = frozenset(
        (x, anc)
        for x in sorted(c1)
        for anc in anchors
        if any(c.color((x, w)) == green for w in anchor_of[anc])
    )
    if not edges:
        raise InternalInconsistency("contracted graph is empty")
    out_deg = Counter(x for x, _ in edges)
    in_deg = Counter(anc for _, anc in edges)
    if len({out_deg[x] for x in c1}) != 1 or len(set(in_deg.values())) != 1:
        raise InternalInconsistency("contracted graph is not semiregular")
    if len(edges) == len(c1) * m:
        raise InternalInconsistency("contracted graph is complete")
    return _finish_coherent(
        c, c1, c2, "bipartite", None, tuple(sorted(c1)), anchors, edges, None, led
    )


def _finish_coherent(c, c1, c2, kind, part, v1, v2, edges, y, led) -> CoherentSplit:
    if kind == "partition":
        if part.domain != tuple(sorted(c1)):
            raise InternalInconsistency("partition must cover the large side")
        bad = part.alpha_defects(Fraction(1, 2), len(c1))
        if bad:
            raise InternalInconsistency("; ".join(bad))
        v1 = ()
        v2 = ()
        edges = frozenset()
    else:
        if 2 * len(v1) < len(c1):
            raise InternalInconsistency("left side lost more than half")
        if 2 * len(v2) > len(c2):
            raise InternalInconsistency("right side kept more than half")
        if not edges:
            raise InternalInconsistency("split graph is empty")
        if len(edges) == len(v1) * len(v2):
            raise InternalInconsistency("split graph is complete")
        adj: dict[int, set[int]] = {u: set() for u in v1}
        for u, w in edges:
            adj[u].add(w)
        for group in _twin_groups(v1, adj):
            if 2 * len(group) > len(v1):
                raise InternalInconsistency(
                    f"twin class of {len(group)} on a {len(v1)}-point side"
                )
    return CoherentSplit(
        kind,
        part,
        tuple(v1),
        tuple(v2),
        edges,
        y,
        tuple(led.points),
        tuple(led.mults),
        led.cost(),
        tuple(led.trace),
    )


# ---------------------------------------------------------------------------
# the bipartite ladder


def _johnson_identity(npoints: int, subsets: Sequence[frozenset[int]]) -> JohnsonId:
    """Identification when the given subsets are all s-subsets of the
    points; the pair color convention is s minus the overlap."""
    sizes = {len(s) for s in subsets}
    if len(sizes) != 1:
        raise InternalInconsistency("subset sizes are not uniform")
    s = sizes.pop()
    if len(set(subsets)) != len(subsets) or len(subsets) != comb(npoints, s):
        raise InternalInconsistency("subsets do not cover the full family")
    lambda_raw = [
        frozenset(i for i, sub in enumerate(subsets) if p in sub)
        for p in range(npoints)
    ]
    order = sorted(range(npoints), key=lambda p: sorted(lambda_raw[p]))
    position = {p: i for i, p in enumerate(order)}
    lambda_sets = tuple(lambda_raw[p] for p in order)
    point_to_set = tuple(
        frozenset(position[p] for p in sub) for sub in subsets
    )
    color_to_intersection = {s - t: t for t in range(s + 1)}
    return JohnsonId(npoints, s, lambda_sets, point_to_set, color_to_intersection)


def _whole_scheme(c: Configuration) -> Optional[JohnsonId]:
    """Cost-free identification of the entire coloring as a subset
    scheme, when the vertex count admits one."""
    n = c.gamma_size
    s = 2
    while comb(2 * s + 1, s) <= n:
        m = 2 * s + 1
        while comb(m, s) < n:
            m += 1
        if comb(m, s) == n:
            try:
                return identify_johnson(c, m, s)
            except SchemeError:
                pass
        s += 1
    return None


def _containment_relations(
    right: int, family: Sequence[frozenset[int]], d: int
) -> tuple[tuple[frozenset, ...], int]:
    """Distinct d-tuples of right-side points, grouped by how many family
    sets contain them; returns the relations and the bucket count."""
    buckets: dict[int, set] = {}
    for combo in combinations(range(right), d):
        cset = set(combo)
        count = sum(1 for h in family if cset <= h)
        bucket = buckets.setdefault(count, set())
        for perm in permutations(combo):
            bucket.add(perm)
    ordered = [frozenset(buckets[t]) for t in sorted(buckets)]
    return tuple(ordered), len(buckets)


def _dary_configuration(right: int, family, d: int, d1: int, v1p_count: int) -> Configuration:
    """Coherent d-ary refinement of the neighborhood structure on the
    right side."""
    if d == d1:
        scarlet = frozenset(
            perm
            for h in family
            for perm in permutations(sorted(h))
        )
        relations: tuple = (scarlet,)
        buckets = 2
    else:
        relations, buckets = _containment_relations(right, family, d)
        if buckets == 1:
            # a uniform count means the neighborhoods form a d-design;
            # the block count then has a hard floor
            s_rw = min(d // 2, right - d1)
            if s_rw >= 1 and v1p_count < comb(right, s_rw):
                raise InternalInconsistency(
                    "a design this small is impossible: "
                    f"{v1p_count} blocks under a floor of {comb(right, s_rw)}"
                )
            raise ResourceLimitExceeded(
                "the neighborhoods form a design; the right side is too "
                "small to split by containment counts"
            )
    raw = RelStructure(right, d, relations)
    return wl(f2_config(f1_refine(raw)))


def _mixed_configuration(
    n1p: int, right: int, adj_local, vertex_coloring: Configuration,
    dominant_local, restriction: Configuration
) -> Configuration:
    """Coherent refinement of the two-sided structure: left vertices,
    right vertices colored by the lemma, lemma pair colors inside the
    dominant class, and the cross edges."""
    off = n1p
    rels: list[frozenset] = []
    for col in range(vertex_coloring.num_colors):
        rels.append(
            frozenset(
                (off + z, off + z)
                for z in range(right)
                if vertex_coloring.colors[z] == col
            )
        )
    dom = sorted(dominant_local)
    for col in range(restriction.num_colors):
        pairs = set()
        for i in range(len(dom)):
            for j in range(len(dom)):
                if i != j and restriction.color((i, j)) == col:
                    pairs.add((off + dom[i], off + dom[j]))
        if pairs:
            rels.append(frozenset(pairs))
    cross = set()
    for u in range(n1p):
        for w in adj_local[u]:
            cross.add((u, off + w))
            cross.add((off + w, u))
    rels.append(frozenset(cross))
    raw = RelStructure(n1p + right, 2, tuple(rels))
    return wl(f2_config(f1_refine(raw)))


def _assert_shrink(n2_old: int, n2_new: int, claim: Optional[str]) -> None:
    if n2_new >= n2_old:
        raise InternalInconsistency(
            f"right side failed to shrink: {n2_old} -> {n2_new}"
        )
    if claim == "twothirds" and 3 * n2_new > 2 * n2_old:
        raise InternalInconsistency(
            f"claimed factor 2/3 missed: {n2_old} -> {n2_new}"
        )
    if claim == "third" and 3 * n2_new > n2_old:
        raise InternalInconsistency(
            f"claimed factor 1/3 missed: {n2_old} -> {n2_new}"
        )
    if claim == "half" and 2 * n2_new > n2_old:
        raise InternalInconsistency(
            f"claimed factor 1/2 missed: {n2_old} -> {n2_new}"
        )


def _accumulate_reddest(sizes: Sequence[int], members_of, n2: int):
    """Union of color classes, reddest first, landing in (n2/3, 2n2/3]."""
    third = Fraction(n2, 3)
    for col, size in enumerate(sizes):
        if Fraction(size) > third:
            return list(members_of(col)), (col,)
    total = 0
    chosen: list[int] = []
    cols = []
    for col, size in enumerate(sizes):
        if size == 0:
            continue
        chosen.extend(members_of(col))
        cols.append(col)
        total += size
        if Fraction(total) > third:
            break
    if not Fraction(total) > third:
        raise InternalInconsistency("color classes cannot cover a third")
    if 3 * total > 2 * n2:
        raise InternalInconsistency("accumulated classes overshot two thirds")
    return chosen, tuple(cols)


def _pick_side(v1p, adj, v2set: frozenset, sub: frozenset):
    """The half whose twin classes stay small; first choice is the named
    subset, the fallback its complement."""
    rest = v2set - sub
    if sub and _side_acceptable(v1p, adj, sub):
        return sub
    if rest and _side_acceptable(v1p, adj, rest):
        return rest
    raise InternalInconsistency(
        "both halves of the right side carry an oversized twin class"
    )


def _bip(v1, v2, adj, beta: Fraction, floor0: Fraction, led: _Ledger,
         cutoff: Optional[int], depth: int):
    """Recursive splitter; v1 and v2 are disjoint label tuples, adj maps
    each left label to its right neighbors.  Returns ("partition", cp)
    or ("johnson", jid, support).  Every left label kept whole in a
    partition is bounded by floor0; johnson supports always exceed it."""
    if depth > _DEPTH_CAP:
        raise ResourceLimitExceeded("bipartite recursion exceeded its depth cap")
    n1, n2 = len(v1), len(v2)
    if not n2 < beta * n1:
        raise InternalInconsistency(
            f"right side {n2} not below {beta} of left side {n1}"
        )

    if n1 <= _BASE_CAP:
        for i, v in enumerate(v1):
            led.choose(v, n1 - i, "left point")
        led.note(f"left side of {n1} memorized point by point")
        return "partition", _build_partition(
            [((0, i), [v], None) for i, v in enumerate(v1)]
        )

    twins = _twin_groups(v1, adj)
    if 3 * len(twins[0]) > 2 * n1:
        raise InternalInconsistency(
            f"twin class of {len(twins[0])} on a left side of {n1}"
        )
    group_of = {v: g for g in twins for v in g}
    classes: dict[tuple[int, int], list[int]] = {}
    for v in v1:
        classes.setdefault((len(group_of[v]), len(adj[v])), []).append(v)
    cap = min(beta * n1, floor0)
    big = [
        (t, d, members)
        for (t, d), members in classes.items()
        if t == 1 and Fraction(len(members)) > cap
    ]

    def outer_groups(skip=()):
        out = []
        for (t, d), members in classes.items():
            if (t, d) in skip:
                continue
            if t >= 2:
                parts = sorted(
                    {group_of[v] for v in members}, key=lambda g: g[0]
                )
                out.append(((0, t, d), members, parts))
            else:
                out.append(((0, t, d), members, None))
        return out

    if not big:
        led.note("left side split by twin multiplicity and degree")
        return "partition", _build_partition(outer_groups())

    d1_key = (1, big[0][1])
    d1 = big[0][1]
    v1p = tuple(sorted(big[0][2]))
    if Fraction(len(v1p)) <= floor0:
        led.note("dominant degree class small enough to keep whole")
        return "partition", _build_partition(outer_groups())

    v2set = frozenset(v2)
    work = {v: frozenset(adj[v]) for v in v1p}
    if 2 * d1 > n2:
        work = {v: v2set - nb for v, nb in work.items()}
        d1 = n2 - d1
        led.note("edges complemented to keep the common degree small")
    if not 1 < d1 < n2 - 1:
        raise InternalInconsistency(
            f"a twinless majority cannot have degree {d1} of {n2}"
        )

    family = [work[v] for v in v1p]
    if len(set(family)) != len(family):
        raise InternalInconsistency("twinless vertices share a neighborhood")
    if len(family) == comb(n2, d1):
        led.note(
            f"every {d1}-subset of the right side occurs as a neighborhood"
        )
        pos = {w: i for i, w in enumerate(v2)}
        jid = _johnson_identity(
            n2, [frozenset(pos[w] for w in work[v]) for v in v1p]
        )
        return "johnson", jid, v1p

    cut = small_right_side(n1) if cutoff is None else cutoff
    if n2 <= cut:
        for j, w in enumerate(v2):
            led.choose(w, n2 - j, "right point")
        led.note(f"right side of {n2} fixed pointwise; left side colored "
                 "by neighborhoods")
        rows: dict[frozenset, list[int]] = {}
        for v in v1:
            rows.setdefault(frozenset(adj[v]), []).append(v)
        ordered = sorted(rows, key=lambda r: sorted(r))
        return "partition", _build_partition(
            [((0, i), rows[r], None) for i, r in enumerate(ordered)]
        )

    # the right side is too large to memorize: refine it through the
    # d-ary neighborhood structure
    ell = math.log(len(v1p)) / math.log(n2)
    dcap = 6 * math.ceil(ell)
    d = d1 if d1 <= dcap else dcap
    if d > _ARITY_CAP:
        raise ResourceLimitExceeded(
            f"needs a {d}-ary refinement; capped at {_ARITY_CAP}"
        )
    pos = {w: i for i, w in enumerate(v2)}
    label = {i: w for w, i in pos.items()}
    local_family = [frozenset(pos[w] for w in work[v]) for v in v1p]
    cfg = _dary_configuration(n2, local_family, d, d1, len(v1p))

    def recurse(v2_new_labels, claim, note):
        v2n = tuple(sorted(v2_new_labels))
        _assert_shrink(n2, len(v2n), claim)
        nset = frozenset(v2n)
        adjn = {v: work[v] & nset for v in v1p}
        for g in _twin_groups(v1p, adjn):
            if 2 * len(g) > len(v1p) + 1:
                raise InternalInconsistency(
                    "chosen half kept an oversized twin class"
                )
        beta_new = max(beta, Fraction(2 * len(v2n) + 1, 2 * len(v1p)))
        if beta_new >= 1:
            raise InternalInconsistency("recursion ratio reached one")
        led.note(note)
        res = _bip(v1p, v2n, adjn, beta_new, floor0, led, cutoff, depth + 1)
        if res[0] == "johnson":
            return res
        groups = outer_groups(skip=(d1_key,))
        inner = res[1]
        for col in range(len(inner.cells)):
            groups.append(((1, col), list(inner.class_of(col)), inner.cells[col]))
        return "partition", _build_partition(groups)

    big_twin = None
    for cls in twin_classes(cfg):
        if 2 * len(cls) > n2:
            big_twin = cls
            break
    if big_twin is not None:
        if len(big_twin) == n2:
            raise InternalInconsistency(
                "the refined right side cannot be all twins"
            )
        sub = frozenset(label[i] for i in big_twin)
        side = _pick_side(v1p, work, v2set, sub)
        return recurse(
            side, None,
            f"right side cut along a twin class of {len(big_twin)}",
        )

    dl = design_lemma(cfg, Fraction(2, 3))
    for p in dl.prefix:
        led.choose(label[p], n2, "refinement anchor")
    if dl.case == "no_dominant":
        chosen, cols = _accumulate_reddest(
            dl.coloring.class_sizes(),
            lambda col: [
                label[z] for z in range(n2) if dl.coloring.colors[z] == col
            ],
            n2,
        )
        side = _pick_side(v1p, work, v2set, frozenset(chosen))
        return recurse(
            side, "twothirds",
            f"no dominant color after the prefix; classes {cols} split off",
        )

    # a dominant class with inner structure: weave it together with the
    # cross edges and look at the stable refinement
    adj_local = {i: frozenset(pos[w] for w in work[v]) for i, v in enumerate(v1p)}
    mix = _mixed_configuration(
        len(v1p), n2, adj_local, dl.coloring, dl.dominant_class, dl.restriction
    )
    off = len(v1p)
    mix_classes = vertex_classes_of(mix)
    right_classes = [
        tuple(z - off for z in cls)
        for cls in mix_classes
        if all(v >= off for v in cls)
    ]
    left_classes = [
        tuple(cls) for cls in mix_classes if all(v < off for v in cls)
    ]
    if sum(len(cl) for cl in right_classes) != n2 or sum(
        len(cl) for cl in left_classes
    ) != len(v1p):
        raise InternalInconsistency("refinement mixed the two sides")

    dom2 = max(right_classes, key=len)
    if 3 * len(dom2) < 2 * n2:
        sizes = [len(cl) for cl in right_classes]
        chosen, cols = _accumulate_reddest(
            sizes, lambda col: [label[z] for z in right_classes[col]], n2
        )
        side = _pick_side(v1p, work, v2set, frozenset(chosen))
        return recurse(
            side, "twothirds",
            "no dominant right class after weaving; classes split off",
        )
    if not set(dom2) <= set(dl.dominant_class):
        raise InternalInconsistency(
            "dominant classes of the two refinements must nest"
        )
    if induced(mix, [off + z for z in dom2]).num_colors <= 2:
        raise InternalInconsistency(
            "the woven dominant class cannot be a clique"
        )

    heavy_left = [cl for cl in left_classes if Fraction(len(cl)) > floor0]
    if not heavy_left:
        groups = outer_groups(skip=(d1_key,))
        for i, cl in enumerate(left_classes):
            groups.append(((1, i), [v1p[v] for v in cl], None))
        led.note("weaving split the left side below every threshold")
        return "partition", _build_partition(groups)
    c1m = tuple(sorted(heavy_left[0]))
    dom2m = tuple(sorted(off + z for z in dom2))

    cross_colors = {mix.color((x, w)) for x in c1m for w in dom2m}
    if len(cross_colors) < 2:
        side = _pick_side(
            v1p, work, v2set, v2set - frozenset(label[z] for z in dom2)
        )
        return recurse(
            side, "third",
            "dominant class attached uniformly; the rest of the right "
            "side kept",
        )

    sub = induced(mix, c1m + dom2m)
    cs = coherent_soj(sub)
    subverts = sorted(c1m + dom2m)

    def to_global(i: int) -> int:
        v = subverts[i]
        return v1p[v] if v < off else label[v - off]

    led.absorb(
        [to_global(p) for p in cs.stabilized], cs.multiplicities, cs.trace
    )
    if cs.kind == "partition":
        groups = outer_groups(skip=(d1_key,))
        others = [cl for cl in left_classes if tuple(sorted(cl)) != c1m]
        for i, cl in enumerate(others):
            groups.append(((1, i), [v1p[v] for v in cl], None))
        inner = cs.partition
        for col in range(len(inner.cells)):
            members = [to_global(i) for i in inner.class_of(col)]
            parts = [
                tuple(sorted(to_global(i) for i in part))
                for part in inner.cells[col]
            ]
            groups.append(((2, col), members, parts))
        led.note("coherent split partitioned the dominant left class")
        return "partition", _build_partition(groups)

    w1 = tuple(sorted(to_global(i) for i in cs.v1))
    w2 = tuple(sorted(to_global(i) for i in cs.v2))
    edges = {(to_global(a), to_global(b)) for a, b in cs.edges}
    if Fraction(len(w1)) <= floor0:
        groups = outer_groups(skip=(d1_key,))
        others = [cl for cl in left_classes if tuple(sorted(cl)) != c1m]
        for i, cl in enumerate(others):
            groups.append(((1, i), [v1p[v] for v in cl], None))
        c1g = [v1p[v] for v in c1m]
        rest = sorted(set(c1g) - set(w1))
        groups.append(((2, 0), list(w1), None))
        if rest:
            groups.append(((2, 1), rest, None))
        led.note("coherent split left a small half; kept as plain classes")
        return "partition", _build_partition(groups)

    _assert_shrink(n2, len(w2), "half")
    adjn = {u: frozenset(b for a, b in edges if a == u) for u in w1}
    if not Fraction(len(w2)) < beta * len(w1):
        raise InternalInconsistency("coherent split failed the ratio bound")
    led.note("descending into the coherent split graph")
    res = _bip(w1, w2, adjn, beta, floor0, led, cutoff, depth + 1)
    if res[0] == "johnson":
        return res
    groups = outer_groups(skip=(d1_key,))
    others = [cl for cl in left_classes if tuple(sorted(cl)) != c1m]
    for i, cl in enumerate(others):
        groups.append(((1, i), [v1p[v] for v in cl], None))
    c1g = [v1p[v] for v in c1m]
    rest = sorted(set(c1g) - set(w1))
    if rest:
        groups.append(((2, 0), rest, None))
    inner = res[1]
    for col in range(len(inner.cells)):
        groups.append(((3, col), list(inner.class_of(col)), inner.cells[col]))
    return "partition", _build_partition(groups)


def bipartite_soj(
    g: BipartiteGraph, beta, *, small_v2_cutoff: Optional[int] = None
) -> SoJOutcome:
    """Split the left side of a bipartite graph, or identify it with the
    subset scheme its neighborhoods spell.

    Right-side vertices appear in the ledger offset by n1.  The optional
    cutoff overrides the size below which the right side is simply fixed
    pointwise; it exists for exercising the deeper rungs at small scale.
    """
    beta = _ratio(beta, Fraction(2, 3), "bipartite_soj")
    if g.n2 < 1:
        raise SplitError("the right side is empty")
    if not g.n2 < beta * g.n1:
        raise SplitError(
            f"right side {g.n2} must stay below {beta} of left side {g.n1}"
        )
    nbs = g.neighborhoods()
    adj = {v: frozenset(g.n1 + w for w in nbs[v]) for v in range(g.n1)}
    for group in _twin_groups(range(g.n1), adj):
        if 3 * len(group) > 2 * g.n1:
            raise SplitError(
                f"twin class of {len(group)} exceeds two thirds of {g.n1}"
            )
    led = _Ledger()
    v1 = tuple(range(g.n1))
    v2 = tuple(range(g.n1, g.n1 + g.n2))
    res = _bip(v1, v2, adj, beta, beta * g.n1, led, small_v2_cutoff, 1)
    if res[0] == "partition":
        out = SoJOutcome(
            "partition", res[1], None, v1,
            tuple(led.points), tuple(led.mults), led.cost(), tuple(led.trace),
        )
    else:
        out = SoJOutcome(
            "johnson", None, res[1], res[2],
            tuple(led.points), tuple(led.mults), led.cost(), tuple(led.trace),
        )
    problems = outcome_defects(out, v1, beta)
    if problems:
        raise InternalInconsistency("; ".join(problems))
    _check_index_budget(out.index_cost, g.n1)
    return out


# ---------------------------------------------------------------------------
# the top-level split


def split_or_johnson(
    c: Configuration, alpha=Fraction(2, 3), *, small_v2_cutoff: Optional[int] = None
) -> SoJOutcome:
    """Colored partition with no part above alpha, or a subset scheme on
    at least alpha of the vertices, for a uniprimitive pair coloring."""
    alpha = _ratio(alpha, Fraction(2, 3), "split_or_johnson")
    summary = classify_classical(c)
    if not summary.uniprimitive:
        raise SplitError("split_or_johnson needs a uniprimitive coloring")
    n = c.gamma_size
    led = _Ledger()

    whole = _whole_scheme(c)
    if whole is not None:
        led.note(
            f"whole coloring identified as the {whole.s}-subsets of "
            f"{whole.m} points"
        )
        out = SoJOutcome(
            "johnson", None, whole, tuple(range(n)),
            (), (), 1, tuple(led.trace),
        )
        problems = outcome_defects(out, range(n), alpha)
        if problems:
            raise InternalInconsistency("; ".join(problems))
        return out

    x = 0
    led.choose(x, n, "base point")
    col_of = [c.color((x, v)) for v in range(n)]
    by_color: dict[int, list[int]] = {}
    for v, col in enumerate(col_of):
        by_color.setdefault(col, []).append(v)

    heavy = [
        col for col, members in by_color.items()
        if Fraction(len(members)) > alpha * n
    ]
    if not heavy:
        led.note("no color class dominates around the base point")
        out = SoJOutcome(
            "partition",
            _build_partition(
                [((0, col), members, None) for col, members in by_color.items()]
            ),
            None, tuple(range(n)),
            tuple(led.points), tuple(led.mults), led.cost(), tuple(led.trace),
        )
        problems = outcome_defects(out, range(n), alpha)
        if problems:
            raise InternalInconsistency("; ".join(problems))
        _check_index_budget(out.index_cost, n)
        return out

    aqua = heavy[0]
    if paired_color(c, aqua) != aqua:
        raise InternalInconsistency("a majority color must pair with itself")
    v1 = tuple(by_color[aqua])
    pair = None
    for beige in sorted(by_color):
        if beige == aqua:
            continue
        candidates = sorted(
            {
                c.color((z, w))
                for z in v1
                for w in by_color[beige]
            } - {aqua}
        )
        if candidates:
            pair = (beige, candidates[0])
            break
    if pair is None:
        raise InternalInconsistency(
            "the complement of a majority color has diameter two, so a "
            "cross color must exist"
        )
    beige, cyan = pair
    led.note(
        f"majority color {aqua}; bridge classes via colors "
        f"{beige} and {cyan}"
    )
    v2 = tuple(by_color[beige])
    adj = {
        u: frozenset(w for w in v2 if c.color((u, w)) == cyan) for u in v1
    }
    witness = pointed_semiregular_witness(
        c, x, paired_color(c, aqua), paired_color(c, beige), cyan
    )
    if witness is not None:
        raise InternalInconsistency(f"bridge graph not semiregular: {witness}")
    if all(len(adj[u]) == len(v2) for u in v1):
        raise InternalInconsistency("bridge graph cannot be complete")
    for group in _twin_groups(v1, adj):
        if 2 * len(group) > len(v1):
            raise InternalInconsistency(
                "bridge graph carries an oversized twin class"
            )
    beta = alpha * n / len(v1)
    if not Fraction(2, 3) <= beta < 1:
        raise InternalInconsistency(f"bridge ratio {beta} out of range")

    res = _bip(v1, v2, adj, beta, alpha * n, led, small_v2_cutoff, 1)
    if res[0] == "johnson":
        out = SoJOutcome(
            "johnson", None, res[1], res[2],
            tuple(led.points), tuple(led.mults), led.cost(), tuple(led.trace),
        )
    else:
        inner = res[1]
        groups = [
            ((0, col), members, None)
            for col, members in by_color.items()
            if col != aqua
        ]
        for col in range(len(inner.cells)):
            groups.append(
                ((1, col), list(inner.class_of(col)), inner.cells[col])
            )
        out = SoJOutcome(
            "partition", _build_partition(groups), None, tuple(range(n)),
            tuple(led.points), tuple(led.mults), led.cost(), tuple(led.trace),
        )
    problems = outcome_defects(out, range(n), alpha)
    if problems:
        raise InternalInconsistency("; ".join(problems))
    _check_index_budget(out.index_cost, n)
    return out

"""Local certificates for actions with a large alternating quotient.

A group acting on positions through a quotient containing the alternating
group of an ideal domain either concedes a lot of string symmetry or pins
itself down, one small ideal subset at a time.  For a subset T the verdict
is Full, with a genuine automorphism group whose quotient restriction to T
is the whole alternating group, or NotFull, with a proper bound on
everything automorphisms can do to T.  The verdicts aggregate into
canonical structure on the ideal domain, and certificates of different
subsets or different strings can be compared, which turns the family of
verdicts into a relational structure worth refining.

Everything runs on a combined domain: positions first, ideal points after
them, each group element acting as itself on one part and as its quotient
image on the other.  String constraints and ideal-point constraints then
meet in ordinary string solves, with an extra letter masking whatever a
given stage does not yet constrain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .errors import InternalInconsistency
from .perm import (
    GenSet,
    Homomorphism,
    Permutation,
    alternating_gens,
    orbits,
    pointwise_stabilizer,
    pruned_gens,
    restriction_hom,
    schreier_sims,
)
from .strings import (
    ColoredString,
    IsoCoset,
    Recurse,
    RecursionBudget,
    iso_window,
)


class CertificateError(ValueError):
    """A certificate request violated its preconditions."""


def default_subset_size(n: int, m: int) -> int:
    """Ideal-subset size for certificates: grows with the position count
    but never past half the ideal domain, and never below the smallest
    size with a proper alternating group."""
    grown = min(10, max(8, math.ceil(2 * math.log2(max(n, 2)))))
    return max(3, min(grown, max(3, (m - 1) // 2)))


@dataclass(frozen=True)
class Certificate:
    """Verdict for one ideal subset.

    ``k_gens`` (Full) generate verified string automorphisms on the
    position side and ``gamma_gens`` carry their parallel ideal-domain
    actions.  ``m_gens`` (NotFull) generate the bound on T, written on
    0..k-1 in ascending-T order.  ``window`` is the position set the
    verdict rests on, and ``fallback`` records that the iterative argument
    gave up and an exact solve settled it.
    """

    kind: str
    t: tuple[int, ...]
    window: tuple[int, ...]
    k_gens: Optional[GenSet]
    gamma_gens: tuple[Permutation, ...]
    m_gens: tuple[Permutation, ...]
    fallback: bool


@dataclass(frozen=True)
class AggregateOutcome:
    """Canonical structure pulled out of all Full verdicts.

    ``group_gens`` generate the certified automorphism group on positions;
    ``orbits`` are its ideal-domain orbits.  ``case`` picks the branching
    route: ``orbit_partition`` (no dominant orbit, plenty of moved
    points), ``large_symmetry`` (a dominant orbit carrying its full
    alternating group, listed in ``support``), ``low_transitivity`` (a
    dominant orbit of bounded transitivity ``transitivity``), or
    ``comparison_relation`` (moved points are scarce; ``support`` lists
    them).
    """

    case: str
    group_gens: GenSet
    orbits: tuple[tuple[int, ...], ...]
    support: tuple[int, ...]
    transitivity: int


@dataclass(frozen=True)
class _Run:
    """Everything the iteration decided for one (string, subset) pair."""

    t: tuple[int, ...]
    kind: str
    windows: tuple[tuple[int, ...], ...]
    final_window: tuple[int, ...]
    a0_gens: GenSet
    k_comb: Optional[GenSet]
    m_gens: tuple[Permutation, ...]
    fallback: bool
    invariant: tuple


@lru_cache(maxsize=128)
def _combined_cached(source: GenSet, images: tuple, m: int) -> GenSet:
    n = source.degree
    combo = []
    for g, gi in zip(source.gens, images):
        combo.append(
            Permutation(tuple(g.images) + tuple(n + v for v in gi.images))
        )
    return GenSet(n + m, tuple(combo))


def _combined(phi: Homomorphism) -> GenSet:
    """The diagonal action: each generator as itself on positions and as
    its image on shifted ideal points."""
    return _combined_cached(phi.source, phi.images, phi.image_degree)


@lru_cache(maxsize=128)
def _combined_hom_cached(
    source: GenSet, images: tuple, m: int
) -> Homomorphism:
    return Homomorphism(_combined_cached(source, images, m), images, m)


def _combined_hom(phi: Homomorphism) -> Homomorphism:
    """The quotient map restated on the combined domain; one shared
    instance per quotient so its chains are built once."""
    return _combined_hom_cached(phi.source, phi.images, phi.image_degree)


def _cycle(points: Sequence[int], m: int) -> Permutation:
    images = list(range(m))
    for a, b in zip(points, points[1:]):
        images[a] = b
    images[points[-1]] = points[0]
    return Permutation(tuple(images))


def _setwise_target(t: Sequence[int], m: int, has_odd: bool) -> GenSet:
    """Generators of the ideal-domain setwise stabilizer of t inside the
    giant image: both factor symmetric groups, or their even part when the
    image has no odd elements."""
    ts = sorted(t)
    rest = [v for v in range(m) if v not in set(ts)]
    out: list[Permutation] = []
    if has_odd:
        for part in (ts, rest):
            for a, b in zip(part, part[1:]):
                out.append(_cycle((a, b), m))
    else:
        for part in (ts, rest):
            for triple in zip(part, part[1:], part[2:]):
                out.append(_cycle(triple, m))
        mixed = _cycle((ts[0], ts[1]), m) * _cycle((rest[0], rest[1]), m)
        out.append(mixed)
    return GenSet(m, tuple(out))


def _image_has_odd(phi: Homomorphism) -> bool:
    return any(g.parity() == 1 for g in phi.images)


def _setwise_stabilizer(phi: Homomorphism, t: Sequence[int]) -> GenSet:
    """Setwise stabilizer of the shifted subset in the combined group,
    as the preimage of the ideal-domain stabilizer."""
    target = _setwise_target(t, phi.image_degree, _image_has_odd(phi))
    return pruned_gens(_combined_hom(phi).preimage_of_subgroup(target))


def _contains_alt(gens: GenSet) -> bool:
    if gens.degree < 3:
        return True
    chain = schreier_sims(gens)
    return all(chain.contains(a) for a in alternating_gens(gens.degree))


def contains_full_alternating(gens: GenSet) -> bool:
    """Whether the group holds every even permutation of its domain."""
    return _contains_alt(gens)


def _verify_giant(phi: Homomorphism) -> None:
    if not _contains_alt(GenSet(phi.image_degree, phi.images)):
        raise CertificateError(
            "certificates need a quotient containing the alternating group"
        )


def _masked(x: ColoredString, window: Sequence[int], total: int) -> ColoredString:
    """x on the window, a fresh masking letter everywhere else, padded out
    to the combined domain."""
    letters = [x.alphabet_size] * total
    for p in window:
        letters[p] = x.letters[p]
    return ColoredString(tuple(letters), x.alphabet_size + 1)


def _group_of(piece: IsoCoset, degree: int) -> GenSet:
    """A self-solve returns a subgroup coset; merge representative and
    generators back into one generating set."""
    merged = tuple(
        dict.fromkeys(
            g
            for g in tuple(piece.aut_gens.gens) + (piece.rep,)
            if not g.is_identity()
        )
    )
    if not merged:
        return GenSet.trivial(degree)
    return pruned_gens(GenSet(degree, merged))


def _t_restriction(gens: GenSet, shifted: Sequence[int]) -> GenSet:
    rest = restriction_hom(gens, tuple(shifted))
    return GenSet(len(shifted), rest.images)


def _affected(
    a_gens: GenSet, n: int, shifted: tuple[int, ...], k: int
) -> tuple[int, ...]:
    """Positions whose stabilizer loses the alternating restriction to T.
    Affectedness is constant on orbits, so one test per orbit suffices."""
    out = []
    for orb in orbits(a_gens, points=range(n)):
        rep = min(orb)
        stab = pointwise_stabilizer(a_gens, (rep,))
        if not _contains_alt(_t_restriction(stab, shifted)):
            out.extend(orb)
    return tuple(sorted(out))


def _not_full_bound(image: GenSet, k: int) -> tuple[Permutation, ...]:
    order = schreier_sims(image).order
    if 2 * order >= math.factorial(k):
        raise InternalInconsistency(
            "a deficient T-action cannot reach the alternating order"
        )
    return tuple(image.gens)


def _certificate_run(
    phi: Homomorphism,
    t: tuple[int, ...],
    x: ColoredString,
    solver: Recurse,
    budget: RecursionBudget,
) -> _Run:
    """Grow the affected window until the T-restriction collapses or the
    window stabilizes; verify the stable outcome, falling back to an exact
    solve when the unaffected stabilizer comes up short."""
    n, m = phi.source.degree, phi.image_degree
    k = len(t)
    shifted = tuple(n + v for v in t)
    omega = tuple(range(n))
    a0 = _setwise_stabilizer(phi, t)
    a_gens = a0
    w: tuple[int, ...] = ()
    windows: list[tuple[int, ...]] = []
    for _ in range(n + 2):
        if not _contains_alt(_t_restriction(a_gens, shifted)):
            m_gens = _not_full_bound(_t_restriction(a_gens, shifted), k)
            return _finish_run(
                t, "not_full", windows, w, a0, None, m_gens, False, k
            )
        w_new = _affected(a_gens, n, shifted, k)
        if not set(w_new) >= set(w):
            raise InternalInconsistency("the affected window must only grow")
        if w_new == w:
            return _stable_run(
                phi, t, x, solver, budget, a0, a_gens, w, windows, omega,
                shifted, k,
            )
        w = w_new
        windows.append(w)
        mx = _masked(x, w, n + m)
        piece = iso_window(
            IsoCoset.of(a_gens, Permutation.identity(n + m)),
            mx,
            mx,
            omega,
            solver,
            budget,
        )
        if piece.is_empty():
            raise InternalInconsistency("a self window solve lost the identity")
        a_gens = _group_of(piece, n + m)
    raise InternalInconsistency("window growth outlasted the position count")


def _stable_run(
    phi: Homomorphism,
    t: tuple[int, ...],
    x: ColoredString,
    solver: Recurse,
    budget: RecursionBudget,
    a0: GenSet,
    a_gens: GenSet,
    w: tuple[int, ...],
    windows: list[tuple[int, ...]],
    omega: tuple[int, ...],
    shifted: tuple[int, ...],
    k: int,
) -> _Run:
    n = len(omega)
    total = phi.source.degree + phi.image_degree
    inside = set(w)
    unaffected = tuple(p for p in omega if p not in inside)
    k_comb = pointwise_stabilizer(a_gens, unaffected)
    for g in k_comb:
        proj = Permutation(g.images[:n])
        if x.permuted(proj) != x:
            raise InternalInconsistency(
                "an unaffected-fixing window automorphism must fix the string"
            )
    if _contains_alt(_t_restriction(k_comb, shifted)):
        return _finish_run(t, "full", windows, w, a0, k_comb, (), False, k)
    full_mask = _masked(x, omega, total)
    piece = iso_window(
        IsoCoset.of(a_gens, Permutation.identity(total)),
        full_mask,
        full_mask,
        omega,
        solver,
        budget,
    )
    if piece.is_empty():
        raise InternalInconsistency("a self solve lost the identity")
    honest = _group_of(piece, total)
    if _contains_alt(_t_restriction(honest, shifted)):
        return _finish_run(t, "full", windows, w, a0, honest, (), True, k)
    m_gens = _not_full_bound(_t_restriction(honest, shifted), k)
    return _finish_run(t, "not_full", windows, w, a0, None, m_gens, True, k)


def _finish_run(
    t: tuple[int, ...],
    kind: str,
    windows: list[tuple[int, ...]],
    final_window: tuple[int, ...],
    a0: GenSet,
    k_comb: Optional[GenSet],
    m_gens: tuple[Permutation, ...],
    fallback: bool,
    k: int,
) -> _Run:
    if kind == "full":
        order = schreier_sims(k_comb).order
    else:
        order = schreier_sims(GenSet(k, m_gens)).order
    invariant = (
        kind,
        fallback,
        len(t),
        tuple(len(win) for win in windows),
        len(final_window),
        order,
    )
    return _Run(
        t=t,
        kind=kind,
        windows=tuple(windows),
        final_window=final_window,
        a0_gens=a0,
        k_comb=k_comb,
        m_gens=m_gens,
        fallback=fallback,
        invariant=invariant,
    )


_RUN_CACHE: dict[tuple, _Run] = {}


def _run_for(
    phi: Homomorphism,
    t: Sequence[int],
    x: ColoredString,
    solver: Recurse,
    budget: RecursionBudget,
) -> _Run:
    n, m = phi.source.degree, phi.image_degree
    ts = tuple(sorted(t))
    if len(set(ts)) != len(ts):
        raise CertificateError("the ideal subset must not repeat points")
    if not 3 <= len(ts) <= m // 2:
        raise CertificateError(
            f"subset size {len(ts)} outside 3..{m // 2} for domain {m}"
        )
    if any(not 0 <= v < m for v in ts):
        raise CertificateError("ideal points outside the domain")
    if x.n != n:
        raise CertificateError("string length differs from the position count")
    _verify_giant(phi)
    key = (phi.source, phi.images, m, ts, x.letters, x.alphabet_size)
    hit = _RUN_CACHE.get(key)
    if hit is None:
        budget.bump()
        hit = _certificate_run(phi, ts, x, solver, budget)
        if len(_RUN_CACHE) < 8192:
            _RUN_CACHE[key] = hit
    return hit


def local_certificate(
    phi: Homomorphism,
    t: Sequence[int],
    x: ColoredString,
    solver: Recurse,
    budget: RecursionBudget,
) -> Certificate:
    """Full or NotFull verdict for one ideal subset.

    Full hands back verified string automorphisms whose ideal actions
    restrict to the whole alternating group on T; NotFull hands back a
    T-action bound strictly below the alternating order.  Either way the
    verdict is canonical: conjugating string and subset by a group element
    conjugates the verdict.
    """
    n = phi.source.degree
    run = _run_for(phi, t, x, solver, budget)
    if run.kind == "full":
        omega_gens = []
        gamma_gens = []
        for g in run.k_comb:
            omega_gens.append(Permutation(g.images[:n]))
            gamma_gens.append(Permutation(tuple(v - n for v in g.images[n:])))
        return Certificate(
            kind="full",
            t=run.t,
            window=run.final_window,
            k_gens=GenSet(n, tuple(omega_gens)),
            gamma_gens=tuple(gamma_gens),
            m_gens=(),
            fallback=run.fallback,
        )
    return Certificate(
        kind="not_full",
        t=run.t,
        window=run.final_window,
        k_gens=None,
        gamma_gens=(),
        m_gens=run.m_gens,
        fallback=run.fallback,
    )


def affected_points(
    phi: Homomorphism,
    t: Sequence[int],
    points: Optional[Sequence[int]] = None,
) -> tuple[int, ...]:
    """Positions whose stabilizer inside the T-setwise subgroup loses the
    alternating restriction to T, before any string enters the picture."""
    n, m = phi.source.degree, phi.image_degree
    ts = tuple(sorted(t))
    if not 3 <= len(ts) <= m - 2:
        raise CertificateError("subset size leaves no alternating group")
    _verify_giant(phi)
    shifted = tuple(n + v for v in ts)
    a_gens = _setwise_stabilizer(phi, ts)
    wanted = set(range(n) if points is None else points)
    out = []
    for orb in orbits(a_gens, points=range(n)):
        if not wanted.intersection(orb):
            continue
        stab = pointwise_stabilizer(a_gens, (min(orb),))
        if not _contains_alt(_t_restriction(stab, shifted)):
            out.extend(p for p in orb if p in wanted)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# comparing certificates


def _set_transporter(
    phi: Homomorphism, t1: tuple[int, ...], t2: tuple[int, ...]
) -> Permutation:
    """A combined element whose ideal action carries t1 onto t2 setwise."""
    n, m = phi.source.degree, phi.image_degree
    s1, s2 = sorted(t1), sorted(t2)
    rest1 = [v for v in range(m) if v not in set(s1)]
    rest2 = [v for v in range(m) if v not in set(s2)]
    images = [0] * m
    for a, b in zip(s1 + rest1, s2 + rest2):
        images[a] = b
    sigma = Permutation(tuple(images))
    adjusted = list(images)
    adjusted[s1[0]], adjusted[s1[1]] = adjusted[s1[1]], adjusted[s1[0]]
    for cand in (sigma, Permutation(tuple(adjusted))):
        if phi.in_image(cand):
            lifted = phi.lift(cand)
            return Permutation(
                tuple(lifted.images) + tuple(n + v for v in cand.images)
            )
    raise InternalInconsistency("both parities missing from a giant image")


def _compare_runs(
    phi: Homomorphism,
    x1: ColoredString,
    run1: _Run,
    x2: ColoredString,
    run2: _Run,
    solver: Recurse,
    budget: RecursionBudget,
) -> IsoCoset:
    """Transporters carrying one run onto the other: start from the
    setwise coset and filter through the synchronized window levels.  A
    structural mismatch means no transporter can exist."""
    n, m = phi.source.degree, phi.image_degree
    total = n + m
    if run1.invariant != run2.invariant:
        return IsoCoset.empty()
    coset = IsoCoset.of(run1.a0_gens, _set_transporter(phi, run1.t, run2.t))
    omega = tuple(range(n))
    for w1, w2 in zip(run1.windows, run2.windows):
        coset = iso_window(
            coset,
            _masked(x1, w1, total),
            _masked(x2, w2, total),
            omega,
            solver,
            budget,
        )
        if coset.is_empty():
            return coset
    if run1.fallback:
        coset = iso_window(
            coset,
            _masked(x1, omega, total),
            _masked(x2, omega, total),
            omega,
            solver,
            budget,
        )
    return coset


def _marker(t: Sequence[int], n: int, m: int, k: int) -> ColoredString:
    letters = [0] * (n + m)
    for i, v in enumerate(t):
        letters[n + v] = i + 1
    return ColoredString(tuple(letters), k + 1)


def _omega_part(coset: IsoCoset, n: int) -> IsoCoset:
    if coset.is_empty():
        return IsoCoset.empty()
    gens = tuple(
        Permutation(g.images[:n])
        for g in coset.aut_gens
        if not g.is_identity()
    )
    group = GenSet(n, gens) if gens else GenSet.trivial(n)
    return IsoCoset.of(group, Permutation(coset.rep.images[:n]))


def compare_certificates(
    phi: Homomorphism,
    x1: ColoredString,
    t1: Sequence[int],
    x2: ColoredString,
    t2: Sequence[int],
    solver: Recurse,
    budget: RecursionBudget,
    ordered: bool = False,
) -> IsoCoset:
    """The coset of group elements transporting the certificate of
    (x1, t1) onto that of (x2, t2); empty when the certificates differ.
    ``ordered`` additionally pins t1 onto t2 position by position."""
    n, m = phi.source.degree, phi.image_degree
    run1 = _run_for(phi, t1, x1, solver, budget)
    run2 = _run_for(phi, t2, x2, solver, budget)
    coset = _compare_runs(phi, x1, run1, x2, run2, solver, budget)
    if ordered and not coset.is_empty():
        k = len(run1.t)
        coset = iso_window(
            coset,
            _marker(tuple(t1), n, m, k),
            _marker(tuple(t2), n, m, k),
            tuple(range(n + m)),
            solver,
            budget,
        )
    return _omega_part(coset, n)


# ---------------------------------------------------------------------------
# aggregation


def aggregate_certificates(
    phi: Homomorphism, certs: dict[tuple[int, ...], Certificate]
) -> AggregateOutcome:
    """Combine all Full verdicts into one certified group and classify its
    ideal-domain orbit structure for branching."""
    n, m = phi.source.degree, phi.image_degree
    omega_gens: list[Permutation] = []
    gamma_gens: list[Permutation] = []
    for cert in certs.values():
        if cert.kind != "full":
            continue
        for g, gi in zip(cert.k_gens.gens, cert.gamma_gens):
            if not g.is_identity() or not gi.is_identity():
                omega_gens.append(g)
                gamma_gens.append(gi)
    group = (
        pruned_gens(GenSet(n, tuple(dict.fromkeys(omega_gens))))
        if omega_gens
        else GenSet.trivial(n)
    )
    gamma = (
        GenSet(m, tuple(dict.fromkeys(gamma_gens)))
        if gamma_gens
        else GenSet.trivial(m)
    )
    orbit_list = tuple(
        sorted(tuple(sorted(orb)) for orb in orbits(gamma))
    )
    moved = tuple(
        sorted(v for orb in orbit_list if len(orb) >= 2 for v in orb)
    )
    if 2 * len(moved) < m:
        return AggregateOutcome(
            case="comparison_relation",
            group_gens=group,
            orbits=orbit_list,
            support=moved,
            transitivity=0,
        )
    big = max(orbit_list, key=len)
    if 2 * len(big) <= m:
        return AggregateOutcome(
            case="orbit_partition",
            group_gens=group,
            orbits=orbit_list,
            support=(),
            transitivity=0,
        )
    rest = _t_restriction(gamma, big)
    if _contains_alt(rest):
        return AggregateOutcome(
            case="large_symmetry",
            group_gens=group,
            orbits=orbit_list,
            support=big,
            transitivity=0,
        )
    return AggregateOutcome(
        case="low_transitivity",
        group_gens=group,
        orbits=orbit_list,
        support=big,
        transitivity=_transitivity_degree(rest),
    )


def _transitivity_degree(gens: GenSet) -> int:
    """Largest d with the action d-transitive.  Capped by the fact that
    six-fold transitivity already forces the alternating group."""
    size = gens.degree
    for d in range(2, 7):
        if d > size:
            return size
        start = tuple(range(d))
        seen = {start}
        frontier = [start]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = tuple(g.images[v] for v in cur)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        want = math.perm(size, d)
        if len(seen) != want:
            return d - 1
    raise InternalInconsistency(
        "six-fold transitivity without the alternating group"
    )


# ---------------------------------------------------------------------------
# joint classification of all subsets


def comparison_classes(
    phi: Homomorphism,
    strings: Sequence[ColoredString],
    k: int,
    solver: Recurse,
    budget: RecursionBudget,
) -> tuple[dict[tuple[int, ...], int], ...]:
    """Certificate-equivalence classes of all ordered k-tuples of ideal
    points, jointly over the given strings so equal ids mean equivalent
    across strings too.

    One setwise comparison per subset against each class representative
    settles the set level; the ordered level costs nothing more, because a
    transporter's own ideal action fixes a base ordering and the
    representative's self-symmetry supplies the rest.
    """
    n, m = phi.source.degree, phi.image_degree
    runs: dict[tuple[int, int], _Run] = {}
    classes: list[dict] = []
    membership: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for side, xs in enumerate(strings):
        for subset_index, t in enumerate(
            itertools.combinations(range(m), k)
        ):
            run = _run_for(phi, t, xs, solver, budget)
            runs[(side, subset_index)] = run
            placed = False
            for ci, cls in enumerate(classes):
                rep_run = runs[cls["rep"]]
                if rep_run.invariant != run.invariant:
                    continue
                rep_side = cls["rep"][0]
                coset = _compare_runs(
                    phi, strings[rep_side], rep_run, xs, run, solver, budget
                )
                if coset.is_empty():
                    continue
                base = tuple(
                    coset.rep.images[n + v] - n for v in rep_run.t
                )
                membership[(side, subset_index)] = (ci, base)
                placed = True
                break
            if not placed:
                self_coset = _compare_runs(
                    phi, xs, run, xs, run, solver, budget
                )
                sym = _t_restriction(
                    _group_of(self_coset, n + m),
                    tuple(n + v for v in run.t),
                )
                classes.append(
                    {
                        "rep": (side, subset_index),
                        "sym": tuple(
                            schreier_sims(sym).elements(
                                cap=math.factorial(k) + 1
                            )
                        ),
                    }
                )
                membership[(side, subset_index)] = (
                    len(classes) - 1,
                    run.t,
                )
    ids: dict[tuple[int, tuple[int, ...]], int] = {}
    out: list[dict[tuple[int, ...], int]] = [dict() for _ in strings]
    for side in range(len(strings)):
        for subset_index, t in enumerate(
            itertools.combinations(range(m), k)
        ):
            ci, base = membership[(side, subset_index)]
            sym = classes[ci]["sym"]
            pos = {v: i for i, v in enumerate(base)}
            for tvec in itertools.permutations(t):
                rho = tuple(pos[v] for v in tvec)
                key = (
                    ci,
                    min(
                        tuple(h.images[r] for r in rho) for h in sym
                    ),
                )
                if key not in ids:
                    ids[key] = len(ids)
                out[side][tvec] = ids[key]
    return tuple(out)

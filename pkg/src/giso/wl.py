"""Iterated color refinement for k-ary configurations, and the coherence
property it stabilizes at.

A configuration is coherent when, for tuples of a given color, the number
of points z producing any given vector of substituted-position colors is
the same for every tuple of that color.  One refinement round recolors
each tuple by its old color together with those counts; coherence is
exactly stability under that round.  The refined palettes are ordered
canonically (old color, then sorted count signature), so runs over
relabeled inputs produce literally relabeled colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InternalInconsistency
from .relstruct import Configuration, Indexer, all_tuples

INTERSECTION_TABLE_LIMIT = 64


@dataclass(frozen=True)
class CoherenceWitness:
    """Two same-colored tuples whose substitution counts differ for the
    recorded color vector."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    color_vector: tuple[int, ...]
    count_x: int
    count_y: int


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    witness: Optional[CoherenceWitness]
    # (color vector, tuple color) -> count; entries absent from the map are
    # zero; omitted entirely for palettes past the table limit
    intersection_numbers: Optional[dict[tuple[tuple[int, ...], int], int]]


def _substitution_signature(
    c: Configuration, t: tuple[int, ...], powers: Sequence[int]
) -> dict[tuple[int, ...], int]:
    """Count, per color vector, the z with c(t[i->z]) spelling that vector."""
    base = c.rank_of(t)
    counts: dict[tuple[int, ...], int] = {}
    colors = c.colors
    for z in range(c.gamma_size):
        vec = tuple(
            colors[base + (z - t[i]) * powers[i]] for i in range(c.k)
        )
        counts[vec] = counts.get(vec, 0) + 1
    return counts


def _powers(c: Configuration) -> list[int]:
    return [c.gamma_size ** (c.k - 1 - i) for i in range(c.k)]


def check_coherent(c: Configuration) -> CoherenceReport:
    """Compare substitution signatures within each color class.

    The witness, when present, is deterministic: scanning colors in
    ascending order and tuples in rank order, the first tuple disagreeing
    with its class reference, reported with the least differing vector.
    """
    if c.k < 1:
        return CoherenceReport(True, None, {})
    powers = _powers(c)
    reference: dict[int, tuple[tuple[int, ...], dict]] = {}
    fibers = c.fibers()
    for color in range(c.num_colors):
        for t in fibers[color]:
            sig = _substitution_signature(c, t, powers)
            if color not in reference:
                reference[color] = (t, sig)
                continue
            ref_t, ref_sig = reference[color]
            if sig != ref_sig:
                differing = sorted(
                    vec
                    for vec in set(ref_sig) | set(sig)
                    if ref_sig.get(vec, 0) != sig.get(vec, 0)
                )
                vec = differing[0]
                witness = CoherenceWitness(
                    ref_t, t, vec, ref_sig.get(vec, 0), sig.get(vec, 0)
                )
                return CoherenceReport(False, witness, None)
    table = None
    if c.num_colors <= INTERSECTION_TABLE_LIMIT:
        table = {}
        for color, (_, sig) in reference.items():
            for vec, count in sig.items():
                table[vec, color] = count
    return CoherenceReport(True, None, table)


def intersection_number(
    c: Configuration, color_vector: tuple[int, ...], color: int
) -> int:
    """On-demand count for one (vector, color) pair; meaningful when the
    configuration is coherent."""
    powers = _powers(c)
    for t in all_tuples(c.gamma_size, c.k):
        if c.color(t) == color:
            sig = _substitution_signature(c, t, powers)
            return sig.get(tuple(color_vector), 0)
    raise InternalInconsistency(f"no tuple has color {color}")


def _refine_round(c: Configuration) -> Configuration:
    powers = _powers(c)
    descs = []
    for t, old in zip(all_tuples(c.gamma_size, c.k), c.colors):
        sig = _substitution_signature(c, t, powers)
        descs.append((old, tuple(sorted(sig.items()))))
    palette = Indexer(sorted(set(descs)))
    return Configuration(
        c.gamma_size, c.k, tuple(palette.index(d) for d in descs), palette
    )


def wl_rounds(c: Configuration) -> tuple[Configuration, int, list[int]]:
    """Refine until stable; returns (stable coloring, executed rounds,
    class counts after each round).

    A round that changes nothing still counts: it is how stability is
    detected, so already-coherent input reports one round.
    """
    history: list[int] = []
    rounds = 0
    limit = c.gamma_size**c.k
    while True:
        rounds += 1
        if rounds > limit + 1:
            raise InternalInconsistency("refinement failed to stabilize")
        refined = _refine_round(c)
        history.append(refined.num_colors)
        # refinement only ever adds colors, so an unchanged count means an
        # unchanged partition
        if refined.num_colors == c.num_colors:
            return c, rounds, history
        c = refined


def wl(c: Configuration) -> Configuration:
    """The coarsest coherent refinement of the input coloring."""
    stable, _, _ = wl_rounds(c)
    report = check_coherent(stable)
    if not report.coherent:
        raise InternalInconsistency("stable coloring failed the coherence check")
    return stable

"""Exponent-vector algebra for monomials over an ordered variable set.

A monomial over variables ``Y_1 .. Y_m`` is identified by its exponent
vector, represented as a plain tuple of non-negative ints of length ``m``
(position ``k`` holds the exponent of variable ``Y_{k+1}``).  The all-zero
tuple is the constant monomial 1.  Finite collections of exponent vectors
are manipulated as ``set[Exponent]``; whenever a deterministic order is
needed, :func:`ordered` sorts with the *last* position most significant,
which follows the partial order of the underlying graph.

Multiplying monomials adds their exponent vectors, so powering a set of
monomials amounts to forming all b-fold sums of its vectors.  The maximal
vectors of a set under the componentwise (product) order are its *corner
points*; the set of everything dominated by some corner point is the
*closure* (a staircase set).  Corner points commute with powering and with
sums of sets, which lets downstream planning work with corners only.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Iterable

from .errors import DomainError, StructureError

Exponent = tuple[int, ...]


def order_key(a: Exponent) -> tuple[int, ...]:
    """Sort key placing the last (highest) index as most significant."""
    return tuple(reversed(a))


def ordered(vectors: Iterable[Exponent]) -> list[Exponent]:
    """Deterministic listing of an exponent set (see :func:`order_key`)."""
    return sorted(vectors, key=order_key)


def zero_vector(m: int) -> Exponent:
    return (0,) * m


def unit_vector(m: int, k: int, power: int = 1) -> Exponent:
    """Exponent vector ``power * e_k`` of length ``m`` (0-based ``k``)."""
    a = [0] * m
    a[k] = power
    return tuple(a)


def add_vectors(a: Exponent, b: Exponent) -> Exponent:
    if len(a) != len(b):
        raise StructureError(f"length mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def dominates(a: Exponent, b: Exponent) -> bool:
    """True iff ``a(i) <= b(i)`` for every position (``a`` is dominated by ``b``)."""
    if len(a) != len(b):
        raise StructureError(f"length mismatch: {len(a)} vs {len(b)}")
    return all(x <= y for x, y in zip(a, b))


def corner_points(vectors: Iterable[Exponent]) -> set[Exponent]:
    """Maximal elements of a non-empty exponent set under product order.

    Equal vectors collapse first, so a vector is discarded only when some
    *different* member dominates it.
    """
    pool = set(vectors)
    if not pool:
        raise DomainError("corner_points of an empty set")
    corners = set()
    for a in pool:
        if not any(a != b and dominates(a, b) for b in pool):
            corners.add(a)
    return corners


def closure(corners: Iterable[Exponent]) -> set[Exponent]:
    """All vectors dominated by some member: the staircase under the corners.

    Enumerates the box ``[0, a*(i)]`` per corner and unions the boxes.
    """
    out: set[Exponent] = set()
    for a_star in corners:
        out.update(product(*(range(x + 1) for x in a_star)))
    return out


def translate(vectors: Iterable[Exponent], g: Exponent) -> set[Exponent]:
    """Shift every vector by ``g`` (multiply every monomial by ``Y^g``)."""
    return {add_vectors(a, g) for a in vectors}


def power_set(vectors: Iterable[Exponent], b: int, m: int | None = None) -> set[Exponent]:
    """All b-fold sums of vectors drawn with repetition, duplicates collapsed.

    This is the exponent set of the b-th power of the polynomial whose
    support is ``vectors``.  ``b == 0`` gives the zero vector, ``b == 1``
    the input set.  ``m`` fixes the vector length when the input may be
    empty.  Computed by repeated pairwise sums with deduplication, which
    yields the same set as enumerating multisets of size ``b``.
    """
    if b < 0:
        raise DomainError(f"negative power {b}")
    base = set(vectors)
    if m is None:
        if not base:
            raise DomainError("power_set of an empty set needs an explicit length")
        m = len(next(iter(base)))
    if b == 0:
        return {zero_vector(m)}
    out = base
    for _ in range(b - 1):
        out = {add_vectors(a, c) for a in out for c in base}
    return out


def powered_corners(corners: Iterable[Exponent], b: int) -> set[Exponent]:
    """Corner points of the b-th power of a set, from its corners alone.

    The corners of ``A^b`` are exactly the maximal b-fold sums of corners
    of ``A``, so the closure never has to be expanded.
    """
    return corner_points(power_set(corners, b))


def scaled_union_corners(scales: Iterable[int], corners: Iterable[Exponent]) -> set[Exponent]:
    """Corner points of a union of powers ``A^{b_1} ∪ ... ∪ A^{b_r}``.

    The largest scale dominates the rest, so only ``max(scales)`` matters.
    """
    scales = set(scales)
    if not scales:
        raise DomainError("scaled_union_corners with no scales")
    return powered_corners(corners, max(scales))


def sum_set_corners(
    g_corners: Iterable[Exponent], b: int, a_corners: Iterable[Exponent]
) -> set[Exponent]:
    """Corner points of ``G + bA`` from the corners of ``G`` and ``A``.

    Every corner of the sum set has the form ``g* + b·a*`` with both
    factors corners, so it suffices to form the candidate sums and prune
    non-maximal ones.
    """
    scaled = power_set(a_corners, b)
    candidates = {add_vectors(g, a) for g in g_corners for a in scaled}
    return corner_points(candidates)


def count_bounds(corners: Iterable[Exponent]) -> tuple[int, int]:
    """(lower, upper) bounds on the closure size of a corner set.

    Each corner alone spans a box of ``∏(a*(i)+1)`` vectors; the closure
    is at least the largest box and at most the sum of all boxes.
    """
    sizes = [math.prod(x + 1 for x in a) for a in corner_points(corners)]
    if not sizes:
        raise DomainError("count_bounds of an empty corner set")
    return max(sizes), sum(sizes)

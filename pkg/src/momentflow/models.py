"""Polynomial regression models for single variables and their classification.

A node's conditional model is a polynomial in its parents plus an additive
error: each term is an exponent vector (support inside the parent set) tied
to a named regression coefficient.  Models fall into nested classes driven
by the shape of their exponent set:

* full         -- the exponent set equals the closure of its corner points
                  (every lower-order term of every term is present);
* simple       -- full with a single corner point;
* hierarchical -- full with 0/1 corner points only;
* graphical    -- hierarchical, and the corner points are exactly the
                  indicator vectors of the maximal cliques of the
                  interaction graph (covariates joined by an edge whenever
                  some term contains both).

Everything else is "general"; classification never fails, it only reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .beliefs import CoefficientBelief, ErrorMoments
from .errors import StructureError
from .exponents import (
    Exponent,
    closure,
    corner_points,
    ordered,
    zero_vector,
)


@dataclass(frozen=True)
class NodeModel:
    """One variable's polynomial regression on earlier variables.

    ``index`` is the 0-based position in the global variable order,
    ``parents`` the positions the model may depend on (all ``< index``),
    and ``terms`` maps each exponent vector (length ``m``) to the name of
    its regression coefficient.  ``belief`` supplies expectations of
    coefficient products; ``error`` supplies raw moments of the additive
    error.
    """

    index: int
    m: int
    parents: frozenset[int]
    terms: tuple[tuple[Exponent, str], ...]
    belief: CoefficientBelief
    error: ErrorMoments

    def __post_init__(self) -> None:
        if not all(0 <= p < self.index for p in self.parents):
            raise StructureError(
                f"node {self.index}: parents must precede the node, got {sorted(self.parents)}"
            )
        seen: set[Exponent] = set()
        for a, _ in self.terms:
            if len(a) != self.m:
                raise StructureError(f"node {self.index}: term {a} has length {len(a)} != {self.m}")
            if a in seen:
                raise StructureError(f"node {self.index}: duplicate term {a}")
            seen.add(a)

    @property
    def exponents(self) -> set[Exponent]:
        return {a for a, _ in self.terms}

    def coefficient(self, a: Exponent) -> str:
        for e, name in self.terms:
            if e == a:
                return name
        raise KeyError(a)


def make_node(
    index: int,
    m: int,
    parents: Iterable[int],
    terms: Mapping[Exponent, str] | Sequence[tuple[Exponent, str]],
    belief: CoefficientBelief,
    error: ErrorMoments,
) -> NodeModel:
    """Build a :class:`NodeModel` with terms in deterministic order."""
    items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
    items.sort(key=lambda t: tuple(reversed(t[0])))
    return NodeModel(
        index=index,
        m=m,
        parents=frozenset(parents),
        terms=tuple(items),
        belief=belief,
        error=error,
    )


@dataclass(frozen=True)
class ModelClass:
    """Classification result for one node model."""

    label: str
    full: bool
    simple: bool
    hierarchical: bool
    graphical: bool
    corners: tuple[Exponent, ...]
    cliques: tuple[tuple[int, ...], ...] = field(default=())


def validate_support(model: NodeModel) -> list[str]:
    """Report every term with a nonzero exponent outside the parent set."""
    violations = []
    for a, name in model.terms:
        bad = [i for i, x in enumerate(a) if x > 0 and i not in model.parents]
        if bad:
            violations.append(
                f"node {model.index}: term {a} (coefficient {name!r}) "
                f"uses non-parent indices {bad}"
            )
    return violations


def interaction_graph(model: NodeModel) -> dict[int, set[int]]:
    """Undirected graph on the parents: an edge joins two covariates iff
    some single term contains both."""
    adj: dict[int, set[int]] = {p: set() for p in sorted(model.parents)}
    for a, _ in model.terms:
        support = [i for i, x in enumerate(a) if x > 0]
        for i, k in combinations(support, 2):
            adj[i].add(k)
            adj[k].add(i)
    return adj


def maximal_cliques(adj: Mapping[int, set[int]]) -> list[tuple[int, ...]]:
    """All maximal cliques, via Bron-Kerbosch with pivoting.

    Parent sets are tiny, so worst-case growth is irrelevant; what matters
    is exactness, which the classification of graphical models requires.
    """
    cliques: list[tuple[int, ...]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            cliques.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(adj), set())
    return sorted(cliques)


def classify(model: NodeModel) -> ModelClass:
    """Place a node model in the class hierarchy described in the module docstring."""
    exps = model.exponents
    if not exps:
        # A pure-noise node has no terms; treat as the degenerate constant model.
        exps = {zero_vector(model.m)}
    corners = corner_points(exps)
    full = exps == closure(corners)
    simple = full and len(corners) == 1
    hierarchical = full and all(x <= 1 for a in corners for x in a)
    cliques: tuple[tuple[int, ...], ...] = ()
    graphical = False
    if hierarchical:
        cliques = tuple(maximal_cliques(interaction_graph(model)))
        indicators = {
            tuple(1 if i in set(c) else 0 for i in range(model.m)) for c in cliques
        }
        graphical = bool(cliques) and corners == indicators
    if graphical:
        label = "graphical"
    elif simple:
        label = "simple"
    elif hierarchical:
        label = "hierarchical"
    elif full:
        label = "full"
    else:
        label = "general"
    return ModelClass(
        label=label,
        full=full,
        simple=simple,
        hierarchical=hierarchical,
        graphical=graphical,
        corners=tuple(ordered(corners)),
        cliques=cliques,
    )


def graphical_exponents(
    cliques: Sequence[Iterable[int]], m: int
) -> tuple[set[Exponent], set[Exponent]]:
    """(exponent set, corner set) of the graphical model with the given cliques.

    The exponent set holds every 0/1 vector supported inside some clique
    (all simple joint interactions up to the clique size, plus the
    intercept); the corners are the clique indicator vectors.
    """
    exps: set[Exponent] = {zero_vector(m)}
    corners: set[Exponent] = set()
    for clique in cliques:
        members = sorted(set(clique))
        corners.add(tuple(1 if i in members else 0 for i in range(m)))
        for bits in product((0, 1), repeat=len(members)):
            a = [0] * m
            for i, bit in zip(members, bits):
                a[i] = bit
            exps.add(tuple(a))
    return exps, corners


def graphical_count_bound(cliques: Sequence[Iterable[int]]) -> int:
    """Upper bound on the closure size of a graphical model: one intercept
    plus, per clique, the count of its nonempty sub-interactions."""
    total = 1
    for clique in cliques:
        total += 2 ** len(set(clique)) - 1
    return total

"""Exact non-central moments of one node power times a lower monomial.

The central identity: for a node ``Y_j = sum_a theta_a Y^a + v`` and a
monomial ``Y^g`` in earlier variables,

    E[Y_j^b * Y^g] = sum_{k=0..b} C(b,k) m_k(v) *
        sum_{t} multinomial(b-k; t) E[prod theta_a^{t_a}] mu_{sum_a t_a*a + g}

where ``t`` runs over all multiplicity assignments of ``b-k`` across the
node's terms.  Distinct assignments that sum to the same exponent are kept
apart, because their coefficient-product expectations differ; only the
final values add.  Layers with ``m_k(v) = 0`` contribute nothing and are
skipped outright (``m_1 = 0`` always), so their lower moments are never
read.

All lower moments come from a :class:`MomentTable`, a write-once cache
filled in topological order during the donate phase.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

from .beliefs import error_moment, theta_product_moment
from .errors import DomainError, PropagationError, StructureError
from .exponents import Exponent, add_vectors, ordered, power_set, translate, zero_vector
from .models import NodeModel
from .network import Network, founder_raw_moment

MAX_POWER = 8


class MomentTable:
    """Write-once map from exponent vectors to non-central moments.

    The zero vector is always 1.  Re-inserting an existing entry must
    agree within 1e-12 relative; reading an absent entry is a propagation
    -order error, i.e. a planner bug.
    """

    def __init__(self, m: int):
        self.m = m
        self._values: dict[Exponent, float] = {zero_vector(m): 1.0}
        self._provenance: dict[Exponent, str] = {zero_vector(m): "constant"}

    def __contains__(self, a: Exponent) -> bool:
        return a in self._values

    def __len__(self) -> int:
        return len(self._values)

    def get(self, a: Exponent) -> float:
        try:
            return self._values[a]
        except KeyError:
            raise PropagationError(
                f"moment for exponent {a} read before it was donated"
            ) from None

    def put(self, a: Exponent, value: float, provenance: str = "propagated") -> None:
        if len(a) != self.m:
            raise StructureError(f"exponent {a} has length {len(a)} != {self.m}")
        existing = self._values.get(a)
        if existing is not None:
            scale = max(abs(existing), abs(value), 1e-300)
            if abs(existing - value) > 1e-12 * scale:
                raise StructureError(
                    f"conflicting re-insertion for {a}: {existing} vs {value}"
                )
            return
        self._values[a] = value
        self._provenance[a] = provenance

    def provenance(self, a: Exponent) -> str:
        return self._provenance[a]

    def items(self) -> list[tuple[Exponent, float]]:
        return [(a, self._values[a]) for a in ordered(self._values)]


def multinomial(n: int, parts: Sequence[int]) -> int:
    """``n! / prod(parts!)`` with ``sum(parts) == n`` enforced."""
    if any(p < 0 for p in parts):
        raise DomainError(f"negative multiplicity in {parts}")
    if sum(parts) != n:
        raise DomainError(f"multiplicities {parts} do not sum to {n}")
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def _compositions(n: int, slots: int) -> Iterator[tuple[int, ...]]:
    """All assignments of ``n`` indistinct units to ``slots`` ordered slots."""
    if slots == 0:
        if n == 0:
            yield ()
        return
    if slots == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, slots - 1):
            yield (first,) + rest


def node_moment(model: NodeModel, b: int, g: Exponent, table: MomentTable) -> float:
    """``E[Y_j^b * Y^g]`` for the node's own power ``b`` and a monomial ``g``
    over earlier variables, reading lower moments from ``table``."""
    if b < 0:
        raise DomainError(f"negative node power {b}")
    if b > MAX_POWER:
        raise DomainError(f"node power {b} exceeds cap {MAX_POWER}")
    if len(g) != model.m:
        raise StructureError(f"monomial {g} has length {len(g)} != {model.m}")
    if any(g[i] > 0 for i in range(model.index, model.m)):
        raise StructureError(
            f"monomial {g} touches index >= {model.index}; only the node power may"
        )
    if b == 0:
        return table.get(g)
    total = 0.0
    for k in range(b + 1):
        mk = error_moment(model.error, k, owner=f"node {model.index}")
        if mk == 0.0:
            continue
        layer = 0.0
        for counts in _compositions(b - k, len(model.terms)):
            powers: dict[str, int] = {}
            summed = g
            for (a, coeff), t in zip(model.terms, counts):
                if t == 0:
                    continue
                powers[coeff] = powers.get(coeff, 0) + t
                for _ in range(t):
                    summed = add_vectors(summed, a)
            theta = theta_product_moment(model.belief, powers)
            if theta == 0.0:
                continue
            layer += multinomial(b - k, counts) * theta * table.get(summed)
        total += math.comb(b, k) * mk * layer
    return total


def required_exponents(model: NodeModel, b: int, g: Exponent) -> set[Exponent]:
    """Every lower-moment exponent the expansion of ``E[Y_j^b * Y^g]`` can
    touch: the union over layers ``k`` of the (b-k)-th power of the term
    set, shifted by ``g``."""
    if b < 0:
        raise DomainError(f"negative node power {b}")
    out: set[Exponent] = set()
    for k in range(b + 1):
        out |= translate(power_set(model.exponents, b - k, m=model.m), g)
    return out


def founder_moment(net: Network, a: Exponent, decision: str | None = None) -> float:
    """Product of founder raw moments: founders are mutually independent, so
    ``E[Y^a]`` factorises across the founder indices of ``a``."""
    if decision is not None:
        net = net.for_decision(decision)
    if len(a) != net.m:
        raise StructureError(f"exponent {a} has length {len(a)} != {net.m}")
    out = 1.0
    for i, power in enumerate(a):
        if power == 0:
            continue
        spec = net.founders.get(i)
        if spec is None:
            raise DomainError(f"exponent {a} touches non-founder index {i}")
        out *= founder_raw_moment(spec, power, owner=f"founder {net.names[i]}")
    return out

"""Backward request planning: who must donate which moment expectations.

Planning walks panels from the decision maker down.  Every monomial
expectation is owned by the panel of its *leading* variable (the highest
index with a nonzero exponent).  A panel that must donate ``E[Y_j^b Y^g]``
expands its own variable through its regression model and requests the
surviving lower monomials from their leading panels in turn:

* the expansion needs the term-set powers ``A^{b-k}`` for every error
  layer ``k`` with ``m_k(v) != 0``; since ``m_1 = 0`` identically, the
  ``k = 1`` layer is never requested;
* a founder panel serves its own variable's power from its raw moments and
  re-routes the residual monomial (founders are mutually independent of
  everything ordered below them).

The result is a static :class:`MessagePlan`: the per-pair transfer sets,
each panel's donation set (everything with that leading index) and request
set.  Executing donations in topological order then never reads a moment
before it is written.

Closed-form shortcuts mirror the planner for special shapes: corner-only
planning when every node model is full, a per-variable order recursion on
forests of simple models, and the donation count for complete-graph
graphical models.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DomainError, OrderError, RoutingError
from .exponents import (
    Exponent,
    closure,
    corner_points,
    ordered,
    power_set,
    powered_corners,
    translate,
)
from .models import NodeModel, classify
from .network import (
    GaussianFounder,
    MomentListFounder,
    Network,
    UtilitySpec,
    monomial_label,
    utility_exponents,
)


def leading_index(a: Exponent) -> int | None:
    """Highest index with a nonzero exponent; None for the constant."""
    for i in range(len(a) - 1, -1, -1):
        if a[i] > 0:
            return i
    return None


def _strip(a: Exponent, j: int) -> Exponent:
    return a[:j] + (0,) + a[j + 1 :]


def expansion_layers(b: int) -> list[int]:
    """Term-set powers whose monomials an order-``b`` donation can read:
    ``b`` (no error factor) and ``b-k`` for ``k >= 2``.  The first-order
    error layer drops out because the error has zero mean."""
    return [b] + list(range(b - 2, -1, -1))


def requests_for(model: NodeModel, g: Exponent) -> dict[int, set[Exponent]]:
    """Requests a node panel must send to donate ``E[Y^g]``, grouped by the
    leading index of each requested monomial."""
    j = model.index
    if any(g[i] > 0 for i in range(j + 1, model.m)):
        raise RoutingError(f"monomial {g} routed to panel {j} but leads higher")
    b = g[j]
    if b == 0:
        raise RoutingError(f"monomial {g} routed to panel {j} without its variable")
    ghat = _strip(g, j)
    needed: set[Exponent] = set()
    for power in expansion_layers(b):
        needed |= translate(power_set(model.exponents, power, m=model.m), ghat)
    routed: dict[int, set[Exponent]] = defaultdict(set)
    for a in needed:
        i = leading_index(a)
        if i is not None:
            routed[i].add(a)
    return dict(routed)


def founder_split(i: int, g: Exponent) -> dict[int, set[Exponent]]:
    """A founder serves its own power and re-routes the residual monomial."""
    if leading_index(g) != i:
        raise RoutingError(f"monomial {g} routed to founder {i} but leads elsewhere")
    residual = _strip(g, i)
    rest = leading_index(residual)
    return {rest: {residual}} if rest is not None else {}


@dataclass(frozen=True)
class MessagePlan:
    """Static request/donate schedule for one network and utility.

    ``transfers[(i, j)]`` is what panel ``i`` donates to requester ``j``
    (``j == m`` denotes the decision maker); ``donations[j]`` is panel
    ``j``'s full donation set, ``requests[j]`` everything panel ``j``
    requests from below.  All sets are in canonical order, and every
    vector in ``donations[j]`` has leading index ``j``.
    """

    m: int
    transfers: Mapping[tuple[int, int], tuple[Exponent, ...]]
    donations: Mapping[int, tuple[Exponent, ...]]
    requests: Mapping[int, tuple[Exponent, ...]]

    @property
    def total_donations(self) -> int:
        return sum(len(v) for v in self.donations.values())

    def donation_order(self, j: int) -> int:
        """Largest power of variable ``j`` among panel ``j``'s donations."""
        return max((g[j] for g in self.donations.get(j, ())), default=0)


def _chain(origin: Mapping[Exponent, tuple[int, Exponent | None]], a: Exponent,
           names: Sequence[str]) -> str:
    parts = [monomial_label(a, names)]
    seen = {a}
    cur = a
    while cur in origin:
        requester, via = origin[cur]
        if via is None:
            parts.append(f"requested by Q{requester + 1} (decision maker)")
            break
        parts.append(f"requested by Q{requester + 1} donating {monomial_label(via, names)}")
        if via in seen:
            break
        seen.add(via)
        cur = via
    return " <- ".join(parts)


def plan(net: Network, u: UtilitySpec | None = None) -> MessagePlan:
    """Run the backward request phase for the whole network."""
    u = net.utility if u is None else u
    m = net.m
    pending: dict[int, set[Exponent]] = defaultdict(set)
    transfers: dict[tuple[int, int], set[Exponent]] = defaultdict(set)
    origin: dict[Exponent, tuple[int, Exponent | None]] = {}

    def route(a: Exponent, requester: int, via: Exponent | None) -> None:
        i = leading_index(a)
        if i is None:
            return
        transfers[(i, requester)].add(a)
        pending[i].add(a)
        origin.setdefault(a, (requester, via))

    for a in ordered(utility_exponents(u)):
        route(a, m, None)

    donations: dict[int, tuple[Exponent, ...]] = {}
    for j in range(m - 1, -1, -1):
        mine = ordered(pending[j])
        donations[j] = tuple(mine)
        for g in mine:
            if net.is_founder(j):
                routed = founder_split(j, g)
            else:
                routed = requests_for(net.nodes[j], g)
            for exps in routed.values():
                for a in exps:
                    route(a, j, g)

    requests: dict[int, tuple[Exponent, ...]] = {}
    for j in list(range(m)) + [m]:
        incoming: set[Exponent] = set()
        for (i, k), exps in transfers.items():
            if k == j:
                incoming |= exps
        requests[j] = tuple(ordered(incoming))

    result = MessagePlan(
        m=m,
        transfers={pair: tuple(ordered(exps)) for pair, exps in transfers.items()},
        donations=donations,
        requests=requests,
    )
    _check_orders(net, result, origin)
    return result


def _check_orders(net: Network, result: MessagePlan,
                  origin: Mapping[Exponent, tuple[int, Exponent | None]]) -> None:
    """Fail planning when a stored moment list is too short for the plan."""
    problems = []
    for j in range(net.m):
        order = result.donation_order(j)
        if order == 0:
            continue
        top = next(g for g in result.donations[j] if g[j] == order)
        spec = net.founders.get(j)
        if isinstance(spec, MomentListFounder) and order > len(spec.moments):
            problems.append(
                f"founder {net.names[j]} stores {len(spec.moments)} raw moments but "
                f"order {order} is needed: {_chain(origin, top, net.names)}"
            )
        model = net.nodes.get(j)
        if model is None:
            continue
        from .beliefs import IndependentMomentsBelief, RawErrorMoments

        if isinstance(model.error, RawErrorMoments) and order > len(model.error.moments):
            problems.append(
                f"node {net.names[j]} stores {len(model.error.moments)} error moments "
                f"but order {order} is needed: {_chain(origin, top, net.names)}"
            )
        if isinstance(model.belief, IndependentMomentsBelief):
            for coeff, stored in sorted(model.belief.moments.items()):
                if order > len(stored):
                    problems.append(
                        f"node {net.names[j]} coefficient {coeff!r} stores "
                        f"{len(stored)} raw moments but order {order} may be needed: "
                        f"{_chain(origin, top, net.names)}"
                    )
    if problems:
        raise OrderError("; ".join(problems))


def pair_closure(corners, i: int) -> set[Exponent]:
    """The part of a corner set's closure actually donated by panel ``i``:
    vectors with a nonzero ``i``-th entry (the rest lead elsewhere)."""
    return {a for a in closure(corners) if a[i] > 0}


def full_model_corner_plan(
    net: Network, u: UtilitySpec | None = None
) -> dict[tuple[int, int], tuple[Exponent, ...]]:
    """Corner-only planning when every node model is full.

    For full models the whole expansion is the closure of its corners, so
    requests can be planned on corners alone: the corners donated by ``i``
    to ``j`` come from ``b-fold corner powers plus the residual``, and the
    general plan's transfer sets are recovered as ``pair_closure``.
    """
    u = net.utility if u is None else u
    m = net.m
    for j, model in sorted(net.nodes.items()):
        if not classify(model).full:
            raise DomainError(f"node {net.names[j]} is not a full model")
    pending: dict[int, set[Exponent]] = defaultdict(set)
    pair: dict[tuple[int, int], set[Exponent]] = defaultdict(set)

    def route(a: Exponent, requester: int) -> None:
        i = leading_index(a)
        if i is None:
            return
        pair[(i, requester)].add(a)
        pending[i].add(a)

    for a in utility_exponents(u):
        route(a, m)

    for j in range(m - 1, -1, -1):
        if not pending[j]:
            continue
        for g in corner_points(pending[j]):
            if net.is_founder(j):
                residual = _strip(g, j)
                if leading_index(residual) is not None:
                    route(residual, j)
                continue
            model = net.nodes[j]
            b = g[j]
            ghat = _strip(g, j)
            for bp in powered_corners(model.exponents, b):
                route(add := tuple(x + y for x, y in zip(bp, ghat)), j)
    return {
        key: tuple(ordered(corner_points(exps))) for key, exps in sorted(pair.items())
    }


def tree_plan(net: Network, u: UtilitySpec | None = None) -> dict[int, int]:
    """Highest per-variable order each panel must donate, for forests.

    Requires every non-founder to be a simple model in its single parent
    (all powers up to some degree), and every utility term to touch one
    variable.  A leaf only serves the utility's own degree; an interior
    variable additionally serves every child's degree times what that
    child must donate.
    """
    u = net.utility if u is None else u
    m = net.m
    degree: dict[int, int] = {}
    children: dict[int, list[int]] = defaultdict(list)
    for j, model in sorted(net.nodes.items()):
        if len(model.parents) != 1:
            raise DomainError(f"node {net.names[j]} has {len(model.parents)} parents; forest needed")
        cls = classify(model)
        if not cls.simple:
            raise DomainError(f"node {net.names[j]} is not a simple model")
        parent = next(iter(model.parents))
        degree[j] = cls.corners[0][parent]
        children[parent].append(j)
    c: dict[int, int] = {i: 0 for i in range(m)}
    for t in u.terms:
        support = [i for i, x in enumerate(t.exponents) if x > 0]
        if len(support) > 1:
            raise DomainError(f"utility term {t.exponents} touches several variables")
        if support:
            i = support[0]
            c[i] = max(c[i], t.exponents[i])
    orders: dict[int, int] = {}
    for i in range(m - 1, -1, -1):
        orders[i] = max([c[i]] + [degree[k] * orders[k] for k in children[i]])
    return orders


def donation_count(degrees: Sequence[int], m: int | None = None) -> int:
    """Total donated moments when panel ``j`` donates the closure slice
    under a single corner with entries ``degrees[j-1]`` in positions
    ``1..j``: ``sum_j (deg_j + 1)^(j-1) * deg_j``."""
    if m is not None and m != len(degrees):
        raise DomainError(f"{len(degrees)} degrees given for m={m}")
    return sum((d + 1) ** j * d for j, d in enumerate(degrees))


def complete_graph_degrees(m: int) -> list[int]:
    """Per-variable donation orders in the complete-graph graphical case:
    the order doubles with every extra panel above."""
    return [2 ** (m - j) for j in range(1, m + 1)]


def render_plan_text(net: Network, result: MessagePlan) -> str:
    """Human listing of the plan: per panel, donations, per-donor requests
    and the combined request set, decision maker first."""
    names = net.names
    m = result.m

    def label_list(exps) -> str:
        return ", ".join(monomial_label(a, names) for a in exps)

    lines: list[str] = []
    for j in [m] + list(range(m - 1, -1, -1)):
        donates = result.donations.get(j, ())
        incoming = [(i, result.transfers[(i, j)]) for (i, k) in sorted(result.transfers) if k == j]
        asks = result.requests.get(j, ())
        if not donates and not incoming and not asks:
            continue
        title = "decision maker" if j == m else names[j]
        lines.append(f"Q{j + 1} ({title})")
        if donates:
            lines.append(f"  Lambda- : {label_list(donates)}")
        for i, exps in incoming:
            lines.append(f"  from Q{i + 1} : {label_list(exps)}")
        if asks:
            lines.append(f"  Lambda+ : {label_list(asks)}")
    if not lines:
        return "empty plan\n"
    return "\n".join(lines) + "\n"


def plan_to_document(net: Network, result: MessagePlan) -> dict:
    """Machine form of the plan with monomial labels."""
    names = net.names
    panels = []
    for j in [net.m] + list(range(net.m - 1, -1, -1)):
        donates = result.donations.get(j, ())
        asks = result.requests.get(j, ())
        incoming = {
            f"Q{i + 1}": [monomial_label(a, names) for a in result.transfers[(i, k)]]
            for (i, k) in sorted(result.transfers)
            if k == j
        }
        if not donates and not asks and not incoming:
            continue
        panels.append(
            {
                "panel": f"Q{j + 1}",
                "variable": None if j == net.m else names[j],
                "donates": [monomial_label(a, names) for a in donates],
                "requests_from": incoming,
                "requests": [monomial_label(a, names) for a in asks],
            }
        )
    return {"panels": panels, "total_donations": result.total_donations}

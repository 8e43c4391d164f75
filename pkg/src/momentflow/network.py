"""The directed graphical model: founders, node models, decisions, utility.

Variables are globally ordered so that every parent precedes its children;
all internal computation works with 0-based indices into that order, and
names are only a display concern.  Each index is either a *founder* (no
parents, mutually independent of the other founders, specified by raw
moments or a Gaussian shorthand) or a *node* carrying a polynomial
regression model on earlier variables.

Decisions enter in exactly two ways: per-decision utility coefficients,
and numeric overrides of founder moments or coefficient means.  Overrides
are dotted paths into numeric leaves, so the graph structure is identical
across decisions by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Union

from .beliefs import (
    DeterministicBelief,
    GaussianBelief,
    GaussianError,
    IndependentMomentsBelief,
    RawErrorMoments,
    belief_ids,
)
from .errors import DomainError, OrderError, StructureError
from .exponents import Exponent
from .models import NodeModel, validate_support


@dataclass(frozen=True)
class GaussianFounder:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise DomainError(f"founder variance must be >= 0, got {self.variance}")


@dataclass(frozen=True)
class MomentListFounder:
    """Explicit raw moments, list position k holding order k+1."""

    moments: tuple[float, ...]


FounderSpec = Union[GaussianFounder, MomentListFounder]


def founder_raw_moment(spec: FounderSpec, k: int, owner: str = "founder") -> float:
    """Raw moment of order ``k`` of a founder variable."""
    if k < 0:
        raise DomainError(f"negative moment order {k}")
    if k == 0:
        return 1.0
    if isinstance(spec, GaussianFounder):
        prev, cur = 1.0, spec.mean
        for order in range(2, k + 1):
            prev, cur = cur, spec.mean * cur + (order - 1) * spec.variance * prev
        return cur
    if k > len(spec.moments):
        raise OrderError(
            f"{owner}: raw moment of order {k} requested, only {len(spec.moments)} provided"
        )
    return spec.moments[k - 1]


@dataclass(frozen=True)
class UtilityTerm:
    """One additive utility term: ``sign * weight * rho(d) * Y^exponents``."""

    weight: float
    exponents: Exponent
    rho: Mapping[str, float] = None  # type: ignore[assignment]
    sign: int = 1

    def __post_init__(self) -> None:
        if self.rho is None:
            object.__setattr__(self, "rho", {})

    def rho_for(self, decision: str) -> float:
        return self.rho.get(decision, 1.0)


@dataclass(frozen=True)
class DecisionCost:
    """Subtractive cost term ``weight * rho(d)``."""

    weight: float
    rho: Mapping[str, float]

    def rho_for(self, decision: str) -> float:
        return self.rho.get(decision, 0.0)


@dataclass(frozen=True)
class UtilitySpec:
    terms: tuple[UtilityTerm, ...]
    cost: DecisionCost | None = None


def utility_exponents(u: UtilitySpec) -> set[Exponent]:
    """Exponent vectors whose expectations the decision maker needs
    (constant terms need none)."""
    return {t.exponents for t in u.terms if any(t.exponents)}


@dataclass(frozen=True)
class Network:
    names: tuple[str, ...]
    founders: Mapping[int, FounderSpec]
    nodes: Mapping[int, NodeModel]
    utility: UtilitySpec
    decisions: tuple[str, ...] = ()
    overrides: Mapping[str, Mapping[str, float]] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.overrides is None:
            object.__setattr__(self, "overrides", {})

    @property
    def m(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def is_founder(self, j: int) -> bool:
        return j in self.founders

    def decision_labels(self) -> tuple[str, ...]:
        return self.decisions if self.decisions else ("default",)

    def for_decision(self, decision: str) -> "Network":
        """Apply the decision's numeric overrides; structure is untouched."""
        paths = self.overrides.get(decision, {})
        net = self
        for path, value in sorted(paths.items()):
            net = apply_override(net, path, value)
        return net


def _override_belief(belief, coeff: str, value: float):
    if isinstance(belief, DeterministicBelief):
        if coeff not in belief.values:
            raise KeyError(f"unknown coefficient {coeff!r}")
        return DeterministicBelief({**belief.values, coeff: value})
    if isinstance(belief, IndependentMomentsBelief):
        stored = belief.moments.get(coeff)
        if stored is None:
            raise KeyError(f"unknown coefficient {coeff!r}")
        return IndependentMomentsBelief(
            {**belief.moments, coeff: (value,) + tuple(stored[1:])}
        )
    if coeff not in belief.ids:
        raise KeyError(f"unknown coefficient {coeff!r}")
    mean = list(belief.mean)
    mean[belief.ids.index(coeff)] = value
    return GaussianBelief(ids=belief.ids, mean=tuple(mean), cov=belief.cov)


def apply_override(net: Network, path: str, value: float) -> Network:
    """Set one numeric leaf addressed by a dotted path.

    Supported paths::

        founders.<name>.mean | founders.<name>.variance
        founders.<name>.moments.<k>
        nodes.<name>.coeff.<id>
        nodes.<name>.error.variance | nodes.<name>.error.moments.<k>
    """
    parts = path.split(".")
    try:
        kind, name, field = parts[0], parts[1], parts[2]
    except IndexError:
        raise StructureError(f"override path too short: {path!r}") from None
    j = net.index_of(name)
    if kind == "founders":
        spec = net.founders.get(j)
        if spec is None:
            raise StructureError(f"{name!r} is not a founder")
        if field in ("mean", "variance") and isinstance(spec, GaussianFounder):
            spec = replace(spec, **{field: value})
        elif field == "moments" and isinstance(spec, MomentListFounder):
            order = int(parts[3])
            moments = list(spec.moments)
            if not 1 <= order <= len(moments):
                raise StructureError(f"override path {path!r}: no stored moment of order {order}")
            moments[order - 1] = value
            spec = MomentListFounder(tuple(moments))
        else:
            raise StructureError(f"override path {path!r} does not match the founder spec")
        return replace(net, founders={**net.founders, j: spec})
    if kind == "nodes":
        model = net.nodes.get(j)
        if model is None:
            raise StructureError(f"{name!r} is not a node")
        if field == "coeff":
            model = replace(model, belief=_override_belief(model.belief, parts[3], value))
        elif field == "error" and parts[3] == "variance" and isinstance(model.error, GaussianError):
            model = replace(model, error=GaussianError(value))
        elif field == "error" and parts[3] == "moments" and isinstance(model.error, RawErrorMoments):
            order = int(parts[4])
            moments = list(model.error.moments)
            if not 2 <= order <= len(moments):
                raise StructureError(f"override path {path!r}: no stored moment of order {order}")
            moments[order - 1] = value
            model = replace(model, error=RawErrorMoments(tuple(moments)))
        else:
            raise StructureError(f"override path {path!r} does not match the node spec")
        return replace(net, nodes={**net.nodes, j: model})
    raise StructureError(f"override path must start with founders/nodes: {path!r}")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(self.violations)


def validate(net: Network) -> ValidationReport:
    """Structural checks for the whole network; reports, never raises."""
    out: list[str] = []
    m = net.m
    if len(set(net.names)) != m:
        out.append("variable names are not unique")
    indices = set(range(m))
    covered = set(net.founders) | set(net.nodes)
    if set(net.founders) & set(net.nodes):
        dup = sorted(set(net.founders) & set(net.nodes))
        out.append(f"indices declared both founder and node: {dup}")
    if covered != indices:
        out.append(f"indices without a specification: {sorted(indices - covered)}")
    for j, model in sorted(net.nodes.items()):
        if model.index != j:
            out.append(f"node {net.names[j]}: model index {model.index} != position {j}")
        bad_parents = [p for p in model.parents if p >= j]
        if bad_parents:
            out.append(
                f"node {net.names[j]}: parents {sorted(bad_parents)} do not precede it"
            )
        out.extend(validate_support(model))
        known = belief_ids(model.belief)
        for a, coeff in model.terms:
            if coeff not in known:
                out.append(f"node {net.names[j]}: coefficient {coeff!r} has no belief")
    for t in net.utility.terms:
        if len(t.exponents) != m:
            out.append(f"utility term {t.exponents} has length {len(t.exponents)} != {m}")
        if not math.isfinite(t.weight):
            out.append(f"utility term {t.exponents} has non-finite weight {t.weight}")
        unknown = sorted(set(t.rho) - set(net.decision_labels()))
        if unknown:
            out.append(f"utility term {t.exponents} references unknown decisions {unknown}")
    if net.utility.cost is not None:
        unknown = sorted(set(net.utility.cost.rho) - set(net.decision_labels()))
        if unknown:
            out.append(f"utility cost references unknown decisions {unknown}")
    for decision, paths in sorted(net.overrides.items()):
        if decision not in net.decision_labels():
            out.append(f"overrides reference unknown decision {decision!r}")
            continue
        for path, value in sorted(paths.items()):
            try:
                apply_override(net, path, value)
            except (StructureError, KeyError) as exc:
                out.append(f"override {path!r} for decision {decision!r}: {exc}")
    return ValidationReport(tuple(out))


def structural_hash(net: Network) -> int:
    """Hash of everything except numeric beliefs; equal across decisions."""
    nodes = tuple(
        (j, tuple(sorted(model.parents)), model.terms)
        for j, model in sorted(net.nodes.items())
    )
    utility = tuple((t.exponents, t.sign) for t in net.utility.terms)
    return hash((net.names, tuple(sorted(net.founders)), nodes, utility, net.decisions))


def monomial_label(a: Exponent, names: Iterable[str]) -> str:
    """Expectation label for a monomial, e.g. ``E[Y2*Y3^2]``; ``E[1]`` for
    the constant."""
    parts = []
    for name, power in zip(names, a):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return f"E[{'*'.join(parts)}]" if parts else "E[1]"

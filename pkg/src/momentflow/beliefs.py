"""Expectation oracles for regression coefficients and observation errors.

The moment engine only ever needs two kinds of expectations from a panel's
belief: raw moments of products of its regression coefficients,
``E[prod theta_i^{t_i}]``, and raw moments of its additive error,
``m_k = E[v^k]``.  Three coefficient beliefs are supported:

* :class:`DeterministicBelief`   -- point values; products are literal.
* :class:`IndependentMomentsBelief` -- per-coefficient raw moment lists;
  products factorise.
* :class:`GaussianBelief`        -- jointly Gaussian coefficients; product
  moments come from the exact recursion
  ``E[X_j * X^k] = mu_j E[X^k] + sum_i cov(j,i) k_i E[X^{k - e_i}]``,
  memoised, which is polynomial in the total degree.

Error moments assume ``m_0 = 1`` and ``m_1 = 0`` throughout; a centered
Gaussian error has ``m_k = (k-1)!! V^{k/2}`` for even ``k`` and 0 for odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import DomainError, OrderError, StructureError

DEGREE_CAP = 16


@dataclass(frozen=True)
class DeterministicBelief:
    values: Mapping[str, float]


@dataclass(frozen=True)
class IndependentMomentsBelief:
    """Raw moments per coefficient, list position k holding order k+1."""

    moments: Mapping[str, tuple[float, ...]]


@dataclass(frozen=True)
class GaussianBelief:
    ids: tuple[str, ...]
    mean: tuple[float, ...]
    cov: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.ids)
        if len(self.mean) != n or len(self.cov) != n or any(len(r) != n for r in self.cov):
            raise StructureError("gaussian belief: mean/cov shapes do not match ids")
        c = np.asarray(self.cov, dtype=float)
        if not np.allclose(c, c.T, atol=1e-10):
            raise StructureError("gaussian belief: covariance must be symmetric")
        if n and np.linalg.eigvalsh(c).min() < -1e-9:
            raise StructureError("gaussian belief: covariance must be positive semi-definite")


CoefficientBelief = Union[DeterministicBelief, IndependentMomentsBelief, GaussianBelief]


@dataclass(frozen=True)
class GaussianError:
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise DomainError(f"error variance must be >= 0, got {self.variance}")


@dataclass(frozen=True)
class RawErrorMoments:
    """Explicit raw error moments, list position k holding order k+1."""

    moments: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.moments and self.moments[0] != 0.0:
            raise StructureError("first raw error moment must be 0 (centered error)")


ErrorMoments = Union[GaussianError, RawErrorMoments]


def belief_ids(belief: CoefficientBelief) -> set[str]:
    if isinstance(belief, DeterministicBelief):
        return set(belief.values)
    if isinstance(belief, IndependentMomentsBelief):
        return set(belief.moments)
    return set(belief.ids)


def _gaussian_product_moment(
    mean: np.ndarray, cov: np.ndarray, powers: tuple[int, ...]
) -> float:
    memo: dict[tuple[int, ...], float] = {}

    def rec(k: tuple[int, ...]) -> float:
        if all(x == 0 for x in k):
            return 1.0
        cached = memo.get(k)
        if cached is not None:
            return cached
        j = next(i for i, x in enumerate(k) if x > 0)
        km = list(k)
        km[j] -= 1
        base = tuple(km)
        value = mean[j] * rec(base)
        for i, ki in enumerate(base):
            if ki > 0 and cov[j, i] != 0.0:
                lower = list(base)
                lower[i] -= 1
                value += cov[j, i] * ki * rec(tuple(lower))
        memo[k] = value
        return value

    return rec(powers)


def theta_product_moment(
    belief: CoefficientBelief, powers: Mapping[str, int], degree_cap: int = DEGREE_CAP
) -> float:
    """Exact ``E[prod theta_id^{power}]`` under the belief.

    Zero powers are ignored; an empty product is 1.  Total degree beyond
    ``degree_cap`` is refused because the Gaussian recursion's term count
    grows factorially.
    """
    active = {k: v for k, v in powers.items() if v > 0}
    if not active:
        return 1.0
    known = belief_ids(belief)
    missing = sorted(set(active) - known)
    if missing:
        raise KeyError(f"unknown coefficient ids {missing}")
    total = sum(active.values())
    if total > degree_cap:
        raise DomainError(f"coefficient product degree {total} exceeds cap {degree_cap}")
    if isinstance(belief, DeterministicBelief):
        out = 1.0
        for name, p in active.items():
            out *= belief.values[name] ** p
        return out
    if isinstance(belief, IndependentMomentsBelief):
        out = 1.0
        for name, p in active.items():
            stored = belief.moments[name]
            if p > len(stored):
                raise OrderError(
                    f"coefficient {name!r}: raw moment of order {p} requested, "
                    f"only {len(stored)} provided"
                )
            out *= stored[p - 1]
        return out
    vec = tuple(active.get(name, 0) for name in belief.ids)
    return _gaussian_product_moment(
        np.asarray(belief.mean, dtype=float),
        np.asarray(belief.cov, dtype=float),
        vec,
    )


def error_moment(spec: ErrorMoments, k: int, owner: str = "error") -> float:
    """Raw error moment ``m_k``; ``m_0 = 1`` and ``m_1 = 0`` always."""
    if k < 0:
        raise DomainError(f"negative moment order {k}")
    if k == 0:
        return 1.0
    if k == 1:
        return 0.0
    if isinstance(spec, GaussianError):
        if k % 2 == 1:
            return 0.0
        out = 1.0
        for odd in range(1, k, 2):
            out *= odd
        return out * spec.variance ** (k // 2)
    if k > len(spec.moments):
        raise OrderError(
            f"{owner}: raw error moment of order {k} requested, "
            f"only {len(spec.moments)} provided"
        )
    return spec.moments[k - 1]

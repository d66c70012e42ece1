"""Multi-source fusion operators over hyper opinions.

All operators take a list of opinions on one domain and return a new opinion.
Dogmatic inputs (u = 0) are weighted by relative-infinity weights, which
default to equal shares and can be overridden through ``FusionOptions``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .core import (
    CLAMP,
    TOLERANCE,
    BaseRate,
    Domain,
    HyperOpinion,
    MultinomialOpinion,
    ValueSet,
    popcount,
    uncertainty_maximize,
)
from .dirichlet import DogmaticLimit, dogmatic_weights
from .errors import (
    BaseRateMismatch,
    DomainMismatch,
    EmptyInput,
    HyperInputUnsupported,
    InvalidKey,
    NegativeMass,
    TotalConflict,
    UnknownOperator,
    ValidationError,
)

OPERATORS = ("cbf", "ecbf", "abf", "wbf", "bcf", "ccf")

#: 1 - K at or below this is treated as total conflict
CONFLICT_EPS = 1e-12
#: per-component tolerance when CCF checks that inputs share a base rate
BASE_RATE_EPS = 1e-12


@dataclass(frozen=True)
class FusionOptions:
    dogmatic_weights: DogmaticLimit | None = None


@dataclass(frozen=True)
class MassFunction:
    """Basic belief assignment over the non-empty subsets of a domain."""

    domain: Domain
    m: Mapping[ValueSet, float]

    __hash__ = None

    def __post_init__(self):
        clean = {}
        for key, mass in self.m.items():
            if not 0 < key <= self.domain.full:
                raise InvalidKey(f"mass key {key:#b} is empty or outside the domain")
            if -CLAMP <= mass < 0.0:
                mass = 0.0
            if mass < 0.0 or not math.isfinite(mass):
                raise NegativeMass(f"invalid mass {mass}")
            if mass > 0.0:
                clean[key] = float(mass)
        if abs(math.fsum(clean.values()) - 1.0) > TOLERANCE:
            raise ValidationError(f"masses sum to {math.fsum(clean.values())}")
        object.__setattr__(self, "m", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def from_opinion(cls, op: HyperOpinion) -> MassFunction:
        m = dict(op.belief)
        if op.uncertainty > 0.0:
            m[op.domain.full] = op.uncertainty
        return cls(op.domain, m)

    @property
    def canonical_key(self):
        """Total order used to make chained combination independent of input order."""
        return tuple(self.m.items())


@dataclass(frozen=True)
class CcfTrace:
    """Intermediate quantities of consensus & compromise fusion.

    ``eta`` is 0 when the compromise mass vanishes and the residual goes to
    uncertainty instead.
    """

    b_cons: Mapping[ValueSet, float]
    b_cons_total: float
    residues: tuple
    b_comp: Mapping[ValueSet, float]
    u_pre: float
    eta: float

    __hash__ = None


def _check_inputs(ops: Sequence[HyperOpinion]) -> list[HyperOpinion]:
    ops = list(ops)
    if not ops:
        raise EmptyInput("no opinions to fuse")
    domain = ops[0].domain
    for op in ops[1:]:
        if op.domain != domain:
            raise DomainMismatch(f"domain {op.domain.labels} != {domain.labels}")
    return ops


def _opinion(domain, belief, uncertainty, base_rate) -> HyperOpinion:
    if all(popcount(x) == 1 for x in belief):
        return MultinomialOpinion(domain, belief, uncertainty, base_rate)
    return HyperOpinion(domain, belief, uncertainty, base_rate)


def _support(ops) -> list[ValueSet]:
    return sorted(set().union(*(op.belief.keys() for op in ops)))


def _products_of_others(values: Sequence[float]) -> list[float]:
    return [math.prod(values[:i] + values[i + 1:]) for i in range(len(values))]


def _mean_base_rate(ops) -> BaseRate:
    n = len(ops)
    return tuple(math.fsum(col) / n for col in zip(*(op.base_rate for op in ops)))


def _confidence_weighted_base_rate(ops) -> BaseRate:
    """sum a^A (1 - u^A) / sum (1 - u^A); plain mean when every input is vacuous."""
    confidence = [1.0 - op.uncertainty for op in ops]
    total = math.fsum(confidence)
    if total == 0.0:
        return _mean_base_rate(ops)
    return tuple(
        math.fsum(a * c for a, c in zip(col, confidence)) / total
        for col in zip(*(op.base_rate for op in ops))
    )


def _dogmatic_belief(ops, gamma: DogmaticLimit) -> dict[ValueSet, float]:
    chosen = [(ops[i], w) for i, w in gamma.weights.items()]
    return {
        x: math.fsum(op.b(x) * w for op, w in chosen)
        for x in _support([op for op, _ in chosen])
    }


def _has_dogmatic(ops) -> bool:
    return any(op.uncertainty == 0.0 for op in ops)


def fuse_cumulative(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> HyperOpinion:
    """Aleatory cumulative belief fusion (evidence addition).

    With every u > 0 the result equals summing the Dirichlet evidence of all
    inputs.  If any input is dogmatic, the non-dogmatic inputs are dropped
    and the dogmatic ones are mixed by their relative-infinity weights.
    """
    opts = opts or FusionOptions()
    ops = _check_inputs(ops)
    domain = ops[0].domain
    a = _confidence_weighted_base_rate(ops)
    if _has_dogmatic(ops):
        gamma = dogmatic_weights(ops, opts.dogmatic_weights)
        return _opinion(domain, _dogmatic_belief(ops, gamma), 0.0, a)

    us = [op.uncertainty for op in ops]
    others = _products_of_others(us)
    u_all = math.prod(us)
    # sum_A prod_{A' != A} u - (N - 1) prod u, rearranged to avoid cancellation
    denom = u_all + math.fsum((1.0 - u) * o for u, o in zip(us, others))
    belief = {
        x: math.fsum(op.b(x) * o for op, o in zip(ops, others)) / denom
        for x in _support(ops)
    }
    return _opinion(domain, belief, u_all / denom, a)


def fuse_averaging(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> HyperOpinion:
    """Averaging belief fusion (arithmetic mean of evidence)."""
    opts = opts or FusionOptions()
    ops = _check_inputs(ops)
    domain = ops[0].domain
    a = _confidence_weighted_base_rate(ops)
    if _has_dogmatic(ops):
        gamma = dogmatic_weights(ops, opts.dogmatic_weights)
        return _opinion(domain, _dogmatic_belief(ops, gamma), 0.0, a)

    us = [op.uncertainty for op in ops]
    others = _products_of_others(us)
    denom = math.fsum(others)
    belief = {
        x: math.fsum(op.b(x) * o for op, o in zip(ops, others)) / denom
        for x in _support(ops)
    }
    return _opinion(domain, belief, len(ops) * math.prod(us) / denom, a)


def fuse_epistemic_cumulative(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> MultinomialOpinion:
    """Cumulative fusion of every input followed by uncertainty maximization."""
    ops = _check_inputs(ops)
    if not all(op.is_multinomial for op in ops):
        raise HyperInputUnsupported("epistemic cumulative fusion needs multinomial opinions")
    return uncertainty_maximize(fuse_cumulative(ops, opts))


def fuse_weighted(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> HyperOpinion:
    """Weighted belief fusion: confidence-weighted mean of evidence."""
    opts = opts or FusionOptions()
    ops = _check_inputs(ops)
    domain = ops[0].domain

    if _has_dogmatic(ops):
        gamma = dogmatic_weights(ops, opts.dogmatic_weights)
        a = tuple(
            math.fsum(ops[i].base_rate[j] * w for i, w in gamma.weights.items())
            for j in range(domain.k)
        )
        return _opinion(domain, _dogmatic_belief(ops, gamma), 0.0, a)

    if all(op.uncertainty == 1.0 for op in ops):
        return _opinion(domain, {}, 1.0, _mean_base_rate(ops))

    us = [op.uncertainty for op in ops]
    confidence = [1.0 - u for u in us]
    others = _products_of_others(us)
    # sum_A prod_{A' != A} u - N prod u  ==  sum_A (1 - u^A) prod_{A' != A} u
    denom = math.fsum(c * o for c, o in zip(confidence, others))
    belief = {
        x: math.fsum(op.b(x) * c * o for op, c, o in zip(ops, confidence, others)) / denom
        for x in _support(ops)
    }
    u = math.fsum(confidence) * math.prod(us) / denom
    return _opinion(domain, belief, u, _confidence_weighted_base_rate(ops))


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: conjunctive combination renormalized by 1 - K."""
    if m1.domain != m2.domain:
        raise DomainMismatch("mass functions live on different domains")
    joint: dict[ValueSet, list[float]] = {}
    conflict = []
    for y, my in m1.m.items():
        for z, mz in m2.m.items():
            x = y & z
            if x:
                joint.setdefault(x, []).append(my * mz)
            else:
                conflict.append(my * mz)
    k = math.fsum(conflict)
    if 1.0 - k <= CONFLICT_EPS:
        raise TotalConflict(f"total conflict K = {k}")
    norm = 1.0 - k
    return MassFunction(m1.domain, {x: math.fsum(v) / norm for x, v in joint.items()})


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    """Dempster conflict K: mass falling on empty intersections."""
    return math.fsum(my * mz for y, my in m1.m.items() for z, mz in m2.m.items() if not y & z)


def fuse_constraint(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> HyperOpinion:
    """Belief constraint fusion: chained Dempster combination plus base-rate mixing.

    Inputs are combined in a canonical order so that the result does not
    depend on the order of ``ops`` at all, not even in the last bit.
    """
    ops = _check_inputs(ops)
    domain = ops[0].domain
    masses = sorted((MassFunction.from_opinion(op) for op in ops), key=lambda m: m.canonical_key)
    combined = reduce(dempster_combine, masses).m
    belief = {x: v for x, v in combined.items() if x != domain.full}
    u = combined.get(domain.full, 0.0)
    if any(op.uncertainty < 1.0 for op in ops):
        a = _confidence_weighted_base_rate(ops)
    else:
        a = _mean_base_rate(ops)
    return _opinion(domain, belief, u, a)


def set_base_rates(a: BaseRate) -> np.ndarray:
    """Additive base rate of every value set, indexed by mask."""
    k = len(a)
    masks = np.arange(1 << k)
    bits = (masks[:, None] >> np.arange(k)) & 1
    return bits @ np.asarray(a, dtype=float)


def _tuple_terms(residues, rates: np.ndarray, full: int) -> np.ndarray:
    """Compromise mass from every tuple of residual focal sets, one per actor.

    Each tuple's mass is the product of its residues.  With a non-empty
    intersection, the share prod_i a(y_i | others) goes to the intersection
    and the rest to the union; with an empty intersection all of it goes to
    the union.
    """
    n = len(residues)
    out = np.zeros(full + 1)
    if n < 2:
        return out
    sets = [np.fromiter(r.keys(), dtype=np.int64, count=len(r)) for r in residues]
    mass = [np.fromiter(r.values(), dtype=float, count=len(r)) for r in residues]

    def shape(i):
        # actor i varies along axis i - 1; actor 0 is looped to bound memory
        return [-1 if j == i else 1 for j in range(1, n)]

    rest_sets = [sets[i].reshape(shape(i)) for i in range(1, n)]
    rest_mass = reduce(np.multiply, [mass[i].reshape(shape(i)) for i in range(1, n)])

    # suffix[i] = intersection of actors i..n-1 (full mask when empty)
    suffix = [None] * (n + 1)
    suffix[n] = np.int64(full)
    for i in range(n - 1, 0, -1):
        suffix[i] = rest_sets[i - 1] & suffix[i + 1]

    for y0, m0 in zip(sets[0], mass[0]):
        prod = m0 * rest_mass
        inter = y0 & suffix[1]
        union = reduce(np.bitwise_or, rest_sets, y0)
        prod, inter, union = np.broadcast_arrays(prod, inter, union)
        a_inter = rates[inter]
        rel = np.ones(prod.shape)
        prefix = np.int64(full)
        for i in range(n):
            others = prefix & suffix[i + 1]
            a_others = rates[others]
            rel = rel * np.divide(a_inter, a_others, out=np.zeros(prod.shape), where=a_others > 0)
            prefix = prefix & (y0 if i == 0 else rest_sets[i - 1])
        hit = inter != 0
        miss = ~hit
        out += np.bincount(inter[hit], weights=(prod * rel)[hit], minlength=full + 1)
        out += np.bincount(union[hit], weights=((1.0 - rel) * prod)[hit], minlength=full + 1)
        out += np.bincount(union[miss], weights=prod[miss], minlength=full + 1)
    return out


def fuse_consensus_compromise(ops: Sequence[HyperOpinion], opts: FusionOptions | None = None):
    """Consensus & compromise fusion.  Returns ``(opinion, CcfTrace)``.

    Consensus keeps the belief every actor agrees on (the minimum per set).
    Compromise redistributes residual belief to intersections and unions of
    the actors' residual focal sets, and a normalization factor scales it so
    the result is additive.  Compromise mass on the whole domain becomes
    uncertainty.
    """
    ops = _check_inputs(ops)
    domain = ops[0].domain
    full = domain.full
    a = ops[0].base_rate
    for op in ops[1:]:
        if any(abs(x - y) > BASE_RATE_EPS for x, y in zip(op.base_rate, a)):
            raise BaseRateMismatch("consensus & compromise fusion needs one shared base rate")

    support = _support(ops)
    b_cons = {x: min(op.b(x) for op in ops) for x in support}
    b_cons = {x: v for x, v in b_cons.items() if v > 0.0}
    residues = []
    for op in ops:
        res = {x: v - b_cons.get(x, 0.0) for x, v in op.belief.items()}
        residues.append({x: v for x, v in res.items() if v > 0.0})

    us = [op.uncertainty for op in ops]
    comp = np.zeros(full + 1)
    for res, o in zip(residues, _products_of_others(us)):
        for x, v in res.items():
            comp[x] += v * o
    if all(residues):
        comp += _tuple_terms(residues, set_base_rates(a), full)

    u_pre = math.prod(us)
    b_cons_total = math.fsum(b_cons.values())
    b_comp_total = math.fsum(comp)
    if b_comp_total > 0.0:
        eta = max((1.0 - b_cons_total - u_pre) / b_comp_total, 0.0)
        u = u_pre + eta * comp[full]
        belief = {x: b_cons.get(x, 0.0) + eta * comp[x] for x in range(1, full)}
        belief = {x: v for x, v in belief.items() if v > 0.0}
    else:
        eta = 0.0
        u = 1.0 - b_cons_total
        belief = dict(b_cons)

    trace = CcfTrace(
        b_cons=MappingProxyType(b_cons),
        b_cons_total=b_cons_total,
        residues=tuple(MappingProxyType(r) for r in residues),
        b_comp=MappingProxyType({x: float(v) for x, v in enumerate(comp) if v > 0.0}),
        u_pre=u_pre,
        eta=eta,
    )
    return _opinion(domain, belief, u, a), trace


_DISPATCH = {
    "cbf": fuse_cumulative,
    "ecbf": fuse_epistemic_cumulative,
    "abf": fuse_averaging,
    "wbf": fuse_weighted,
    "bcf": fuse_constraint,
    "ccf": lambda ops, opts=None: fuse_consensus_compromise(ops, opts)[0],
}


def fuse(operator: str, ops: Sequence[HyperOpinion], opts: FusionOptions | None = None) -> HyperOpinion:
    """Fuse ``ops`` with the operator named by ``operator`` (see ``OPERATORS``)."""
    try:
        fn = _DISPATCH[operator]
    except KeyError:
        raise UnknownOperator(f"unknown operator {operator!r}; choose from {OPERATORS}") from None
    return fn(ops, opts)

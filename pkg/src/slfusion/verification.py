"""Independent oracles and seeded opinion generators.

The oracles deliberately share nothing with :mod:`slfusion.fusion`.  The
evidence oracles go through the Dirichlet bijection and the binary CCF oracle
works on Python sets, so agreement with the closed forms means something.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Domain, HyperOpinion, uniform_base_rate
from .dirichlet import DEFAULT_PRIOR_WEIGHT, EvidenceRecord, evidence_to_opinion, opinion_to_evidence
from .errors import AllVacuous, BaseRateMismatch, DogmaticInput, ValidationError


def _base_rate(ops):
    weights = [1.0 - op.uncertainty for op in ops]
    if sum(weights) == 0.0:
        weights = [1.0] * len(ops)
    total = math.fsum(weights)
    k = ops[0].domain.k
    return tuple(math.fsum(w * op.base_rate[i] for w, op in zip(weights, ops)) / total for i in range(k))


def _evidence(ops):
    if any(op.uncertainty == 0.0 for op in ops):
        raise DogmaticInput("evidence oracles need u > 0 for every input")
    return [opinion_to_evidence(op, DEFAULT_PRIOR_WEIGHT) for op in ops]


def _combine(ops, weights):
    """Map back the weighted sum of evidence vectors."""
    evidence = _evidence(ops)
    keys = set()
    for ev in evidence:
        keys.update(ev.r)
    r = {x: math.fsum(w * ev.r.get(x, 0.0) for w, ev in zip(weights, evidence)) for x in keys}
    record = EvidenceRecord(ops[0].domain, r, _base_rate(ops), DEFAULT_PRIOR_WEIGHT)
    return evidence_to_opinion(record)


def cbf_evidence_oracle(ops: Sequence[HyperOpinion]) -> HyperOpinion:
    """Cumulative fusion as plain addition of Dirichlet evidence."""
    return _combine(ops, [1.0] * len(ops))


def abf_evidence_oracle(ops: Sequence[HyperOpinion]) -> HyperOpinion:
    """Averaging fusion as the arithmetic mean of Dirichlet evidence."""
    return _combine(ops, [1.0 / len(ops)] * len(ops))


def wbf_evidence_oracle(ops: Sequence[HyperOpinion]) -> HyperOpinion:
    """Weighted fusion as the confidence-weighted mean of Dirichlet evidence."""
    if any(op.uncertainty == 0.0 for op in ops):
        raise DogmaticInput("evidence oracles need u > 0 for every input")
    confidence = [1.0 - op.uncertainty for op in ops]
    total = math.fsum(confidence)
    if total == 0.0:
        raise AllVacuous("confidence-weighted mean is undefined without evidence")
    return _combine(ops, [c / total for c in confidence])


def ccf_binary_oracle(op1: HyperOpinion, op2: HyperOpinion) -> HyperOpinion:
    """Two-actor consensus & compromise fusion written out term by term.

    Works on frozensets of labels.  Each tuple term multiplies the residues
    of both actors, and the disjoint-union term requires an empty
    intersection.
    """
    if op1.domain != op2.domain:
        raise ValidationError("domains differ")
    if any(abs(x - y) > 1e-12 for x, y in zip(op1.base_rate, op2.base_rate)):
        raise BaseRateMismatch("binary CCF needs a shared base rate")
    domain = op1.domain
    base = dict(zip(domain.labels, op1.base_rate))
    theta = frozenset(domain.labels)

    def as_sets(op):
        return {frozenset(domain.labels_of(x)): v for x, v in op.belief.items()}

    def a(s):
        return sum(base[v] for v in s)

    def cond(s, given):
        # a(s | given)
        if not given or a(given) == 0.0:
            return 0.0
        return a(s & given) / a(given)

    bA, bB = as_sets(op1), as_sets(op2)
    uA, uB = op1.uncertainty, op2.uncertainty
    keys = set(bA) | set(bB)
    cons = {x: min(bA.get(x, 0.0), bB.get(x, 0.0)) for x in keys}
    resA = {x: bA.get(x, 0.0) - cons[x] for x in keys}
    resB = {x: bB.get(x, 0.0) - cons[x] for x in keys}
    cons_total = sum(cons.values())

    comp = {}

    def add(x, v):
        comp[x] = comp.get(x, 0.0) + v

    for x in keys:
        add(x, resA[x] * uB + resB[x] * uA)
    for y1, r1 in resA.items():
        for y2, r2 in resB.items():
            if r1 == 0.0 or r2 == 0.0:
                continue
            inter, union = y1 & y2, y1 | y2
            both = cond(y1, y2) * cond(y2, y1)
            if inter:
                add(inter, r1 * r2 * both)
                add(union, (1.0 - both) * r1 * r2)
            else:
                add(union, r1 * r2)

    u_pre = uA * uB
    comp_total = sum(comp.values())
    if comp_total == 0.0:
        belief = {x: v for x, v in cons.items()}
        u = 1.0 - cons_total
    else:
        eta = (1.0 - cons_total - u_pre) / comp_total
        u = u_pre + eta * comp.get(theta, 0.0)
        belief = {x: cons.get(x, 0.0) + eta * comp.get(x, 0.0) for x in set(comp) | set(cons) if x != theta}
    masks = {domain.mask(x): v for x, v in belief.items() if v > 0.0}
    return HyperOpinion(domain, masks, u, op1.base_rate)


@dataclass(frozen=True)
class RandomOpinionSpec:
    """Parameters of a seeded batch of random opinions.

    With ``shared_base_rate`` off, each opinion draws its own base rate.
    """

    seed: int
    k: int
    n_actors: int
    hyper: bool = False
    dogmatic_probability: float = 0.0
    vacuous_probability: float = 0.0
    shared_base_rate: bool = True

    def __post_init__(self):
        if not 2 <= self.k <= 16:
            raise ValidationError(f"k must be in [2, 16], got {self.k}")
        if self.n_actors < 1:
            raise ValidationError("n_actors must be >= 1")
        for p in (self.dogmatic_probability, self.vacuous_probability):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"probability {p} outside [0, 1]")


def generate_opinions(spec: RandomOpinionSpec, domain: Domain | None = None) -> list[HyperOpinion]:
    """Deterministic list of valid opinions drawn with PCG64 seeded by ``spec.seed``."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    domain = domain or Domain(tuple(f"x{i}" for i in range(spec.k)))
    if spec.hyper:
        candidates = np.arange(1, domain.full)
    else:
        candidates = np.array(domain.singletons())
    shared = uniform_base_rate(domain)

    out = []
    for _ in range(spec.n_actors):
        if spec.shared_base_rate:
            a = shared
        else:
            a = tuple(rng.dirichlet(np.ones(domain.k)))
        roll = rng.random()
        if roll < spec.dogmatic_probability:
            u = 0.0
        elif roll < spec.dogmatic_probability + spec.vacuous_probability:
            out.append(HyperOpinion(domain, {}, 1.0, a))
            continue
        else:
            u = 1.0 - rng.random()  # (0, 1]
        size = int(rng.integers(1, len(candidates) + 1))
        support = rng.choice(candidates, size=size, replace=False)
        weights = 1.0 - rng.random(size)  # strictly positive
        weights = weights / weights.sum() * (1.0 - u)
        belief = {int(x): float(w) for x, w in zip(support, weights)}
        out.append(HyperOpinion(domain, belief, u, a))
    return out

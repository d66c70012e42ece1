"""Mapping between opinions and Dirichlet evidence (hyper-)PDFs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

from .core import (
    TOLERANCE,
    BaseRate,
    Domain,
    HyperOpinion,
    ValueSet,
    popcount,
    validate_base_rate,
)
from .errors import (
    BadOverride,
    DogmaticOpinion,
    DomainViolation,
    InvalidKey,
    NegativeMass,
    NoDogmaticOpinion,
    ValidationError,
)

#: non-informative prior weight
DEFAULT_PRIOR_WEIGHT = 2.0


@dataclass(frozen=True)
class EvidenceRecord:
    """Dirichlet evidence over the reduced powerset plus base rate and prior weight."""

    domain: Domain
    r: Mapping[ValueSet, float]
    base_rate: BaseRate
    prior_weight: float = DEFAULT_PRIOR_WEIGHT

    __hash__ = None

    def __post_init__(self):
        clean = {}
        for key, value in self.r.items():
            key = int(key)
            if key <= 0 or key >= self.domain.full:
                raise InvalidKey(f"evidence key {key:#b} outside the reduced powerset")
            value = float(value)
            if not math.isfinite(value) or value < 0.0:
                raise NegativeMass(f"evidence must be finite and >= 0, got {value}")
            if value > 0.0:
                clean[key] = value
        if not (math.isfinite(self.prior_weight) and self.prior_weight > 0.0):
            raise ValidationError(f"prior weight must be positive, got {self.prior_weight}")
        object.__setattr__(self, "r", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "base_rate", validate_base_rate(self.domain, self.base_rate))
        object.__setattr__(self, "prior_weight", float(self.prior_weight))

    def alpha(self, x: ValueSet) -> float:
        """Dirichlet strength r(x) + a(x) W.

        The base rate lives on singletons only, so a composite set's strength
        is its evidence alone.
        """
        prior = self.base_rate[x.bit_length() - 1] * self.prior_weight if popcount(x) == 1 else 0.0
        return self.r.get(x, 0.0) + prior


@dataclass(frozen=True)
class DogmaticLimit:
    """Relative weights among dogmatic opinions, keyed by input position."""

    weights: Mapping[int, float] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        w = {int(k): float(v) for k, v in self.weights.items()}
        if any(not math.isfinite(v) or v < 0.0 for v in w.values()):
            raise BadOverride("dogmatic weights must be finite and non-negative")
        if abs(math.fsum(w.values()) - 1.0) > TOLERANCE:
            raise BadOverride(f"dogmatic weights sum to {math.fsum(w.values())}")
        object.__setattr__(self, "weights", MappingProxyType(w))

    @classmethod
    def normalized(cls, weights: Mapping[int, float]) -> DogmaticLimit:
        total = math.fsum(weights.values())
        if total <= 0.0:
            raise BadOverride("dogmatic weights sum to 0")
        return cls({k: v / total for k, v in weights.items()})


def opinion_to_evidence(op: HyperOpinion, prior_weight: float = DEFAULT_PRIOR_WEIGHT) -> EvidenceRecord:
    """r(x) = W b(x) / u.  Dogmatic opinions have no finite image."""
    u = op.uncertainty
    if u == 0.0:
        raise DogmaticOpinion("u = 0 maps to infinite evidence")
    r = {x: prior_weight * b / u for x, b in op.belief.items()}
    return EvidenceRecord(op.domain, r, op.base_rate, prior_weight)


def evidence_to_opinion(ev: EvidenceRecord) -> HyperOpinion:
    """b(x) = r(x) / (W + S), u = W / (W + S) with S the total evidence."""
    w = ev.prior_weight
    denom = w + math.fsum(ev.r.values())
    belief = {x: r / denom for x, r in ev.r.items()}
    return HyperOpinion(ev.domain, belief, w / denom, ev.base_rate)


def _log_density(alphas: Sequence[float], probs: Sequence[float]) -> float:
    """Log of the Dirichlet density; -inf where the density vanishes.

    A zero strength is a degenerate coordinate pinned at p = 0; it drops out of
    the normalization, and any mass placed on it lies outside the support.
    """
    if any(a < 0.0 for a in alphas):
        raise DomainViolation("Dirichlet strengths must be non-negative")
    if any(a == 0.0 and p > 0.0 for a, p in zip(alphas, probs)):
        return -math.inf
    kept = [(a, p) for a, p in zip(alphas, probs) if a > 0.0]
    if not kept:
        raise DomainViolation("all Dirichlet strengths are zero")
    alphas, probs = zip(*kept)
    log_norm = math.lgamma(math.fsum(alphas)) - math.fsum(math.lgamma(a) for a in alphas)
    terms = [log_norm]
    vanishing = False
    for a, p in zip(alphas, probs):
        if a == 1.0:
            continue
        if p == 0.0:
            if a < 1.0:
                raise DomainViolation("p(x) must be non-zero where r(x) + a(x) W < 1")
            vanishing = True
            continue
        terms.append((a - 1.0) * math.log(p))
    return -math.inf if vanishing else math.fsum(terms)


def _check_distribution(probs: Sequence[float]):
    if any(p < 0.0 or not math.isfinite(p) for p in probs):
        raise DomainViolation("probabilities must be finite and non-negative")
    if abs(math.fsum(probs) - 1.0) > TOLERANCE:
        raise DomainViolation(f"probabilities sum to {math.fsum(probs)}")


def dirichlet_pdf(ev: EvidenceRecord, p: Sequence[float]) -> float:
    """Density of the evidence Dirichlet PDF at singleton probabilities ``p``."""
    if any(popcount(x) != 1 for x in ev.r):
        raise InvalidKey("dirichlet_pdf needs singleton-only evidence")
    k = ev.domain.k
    if len(p) != k:
        raise DomainViolation(f"expected {k} probabilities, got {len(p)}")
    _check_distribution(p)
    alphas = [ev.alpha(1 << i) for i in range(k)]
    return math.exp(_log_density(alphas, p))


def hyper_dirichlet_pdf(ev: EvidenceRecord, p_hyper: Mapping[ValueSet, float]) -> float:
    """Density of the evidence hyper-Dirichlet PDF over the reduced powerset.

    ``p_hyper`` maps reduced-powerset masks to probability; missing keys are 0.
    Composite sets without evidence have zero strength and must carry p = 0.
    """
    keys = ev.domain.reduced_powerset()
    for x in p_hyper:
        if x not in keys:
            raise InvalidKey(f"key {x:#b} outside the reduced powerset")
    probs = [float(p_hyper.get(x, 0.0)) for x in keys]
    _check_distribution(probs)
    return math.exp(_log_density([ev.alpha(x) for x in keys], probs))


def dogmatic_weights(ops: Sequence[HyperOpinion], override: DogmaticLimit | None = None) -> DogmaticLimit:
    """Relative infinity weights over the dogmatic members of ``ops``.

    Defaults to equal weights.  An override is restricted to the dogmatic
    positions and renormalized.
    """
    dogmatic = [i for i, op in enumerate(ops) if op.uncertainty == 0.0]
    if not dogmatic:
        raise NoDogmaticOpinion("no input has u = 0")
    if override is None:
        return DogmaticLimit({i: 1.0 / len(dogmatic) for i in dogmatic})
    restricted = {i: override.weights.get(i, 0.0) for i in dogmatic}
    if math.fsum(restricted.values()) <= 0.0:
        raise BadOverride("override gives zero weight to every dogmatic input")
    return DogmaticLimit.normalized(restricted)

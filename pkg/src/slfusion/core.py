"""Domains, value sets and subjective opinions.

Value sets are plain ``int`` bit-sets: bit ``i`` is set when the domain value
at position ``i`` is a member.  With at most 16 values this keeps powerset
enumeration and set algebra cheap (``&``, ``|``, ``==``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    AdditivityViolation,
    BaseRateNotNormalized,
    EmptySet,
    HyperInputUnsupported,
    InvalidDomain,
    InvalidKey,
    NegativeMass,
    ZeroBaseRateSet,
)

#: absolute tolerance for additivity and normalization checks
TOLERANCE = 1e-9
#: values in [-CLAMP, 0) are snapped to exactly 0 before validation
CLAMP = 1e-9

MAX_CARDINALITY = 16

ValueSet = int
BaseRate = tuple  # tuple[float, ...], one entry per domain position
ProjectedDistribution = tuple  # tuple[float, ...], one entry per domain position


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> list[int]:
    """Positions set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class Domain:
    """An ordered frame of distinct value labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not 2 <= len(labels) <= MAX_CARDINALITY:
            raise InvalidDomain(
                f"domain cardinality must be in [2, {MAX_CARDINALITY}], got {len(labels)}"
            )
        for label in labels:
            if not isinstance(label, str) or not label:
                raise InvalidDomain(f"labels must be non-empty strings, got {label!r}")
        if len(set(labels)) != len(labels):
            raise InvalidDomain(f"duplicate labels in {labels}")

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> ValueSet:
        return (1 << self.k) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidKey(f"unknown label {label!r}") from None

    def mask(self, labels: str | Iterable[str]) -> ValueSet:
        """Encode a label, or a collection of labels, as a value set.

        Duplicate labels are rejected rather than merged.
        """
        if isinstance(labels, str):
            labels = [labels]
        out = 0
        for label in labels:
            bit = 1 << self.index(label)
            if out & bit:
                raise InvalidKey(f"duplicate label {label!r} in set")
            out |= bit
        return out

    def labels_of(self, mask: ValueSet) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in members(mask))

    def singletons(self) -> list[ValueSet]:
        return [1 << i for i in range(self.k)]

    def reduced_powerset(self) -> range:
        """All value sets except the empty set and the full domain."""
        return range(1, self.full)

    def contains(self, mask: ValueSet) -> bool:
        return 0 <= mask <= self.full


def _clamp(value: float) -> float:
    if -CLAMP <= value < 0.0:
        return 0.0
    return value


def validate_base_rate(domain: Domain, base_rate: Sequence[float]) -> BaseRate:
    """Return ``base_rate`` as a clamped tuple or raise."""
    a = tuple(_clamp(float(v)) for v in base_rate)
    if len(a) != domain.k:
        raise BaseRateNotNormalized(
            f"base rate has {len(a)} entries for a domain of {domain.k}"
        )
    for v in a:
        if not math.isfinite(v) or v < 0.0:
            raise NegativeMass(f"negative or non-finite base rate {v}")
        if v > 1.0 + TOLERANCE:
            raise BaseRateNotNormalized(f"base rate {v} exceeds 1")
    if abs(math.fsum(a) - 1.0) > TOLERANCE:
        raise BaseRateNotNormalized(f"base rate sums to {math.fsum(a)}")
    return a


def uniform_base_rate(domain: Domain) -> BaseRate:
    return tuple(1.0 / domain.k for _ in range(domain.k))


def validate_components(domain, belief, uncertainty, base_rate):
    """Check opinion components against the additivity and key invariants.

    Returns ``(belief, uncertainty, base_rate)`` with near-zero negatives
    clamped and zero-mass keys dropped.
    """
    clean = {}
    for key, mass in belief.items():
        key = int(key)
        if key <= 0 or key >= domain.full:
            raise InvalidKey(
                f"belief key {key:#b} is not in the reduced powerset of {domain.labels}"
            )
        mass = _clamp(float(mass))
        if not math.isfinite(mass):
            raise NegativeMass(f"non-finite belief mass on {domain.labels_of(key)}")
        if mass < 0.0:
            raise NegativeMass(f"negative belief mass {mass} on {domain.labels_of(key)}")
        if mass > 0.0:
            clean[key] = mass
    u = _clamp(float(uncertainty))
    if not math.isfinite(u) or u < 0.0:
        raise NegativeMass(f"negative or non-finite uncertainty {u}")
    if 1.0 < u <= 1.0 + CLAMP:
        u = 1.0
    a = validate_base_rate(domain, base_rate)
    total = u + math.fsum(clean.values())
    if abs(total - 1.0) > TOLERANCE:
        raise AdditivityViolation(f"u + sum(b) = {total}, expected 1")
    return dict(sorted(clean.items())), u, a


@dataclass(frozen=True, eq=True)
class HyperOpinion:
    """Belief over the reduced powerset, uncertainty and a singleton base rate.

    ``belief`` maps value-set masks to mass; absent keys carry zero mass.
    Construction validates and freezes all components.
    """

    domain: Domain
    belief: Mapping[ValueSet, float]
    uncertainty: float
    base_rate: BaseRate = field(default=None)

    __hash__ = None

    def __post_init__(self):
        a = self.base_rate if self.base_rate is not None else uniform_base_rate(self.domain)
        b, u, a = validate_components(self.domain, self.belief, self.uncertainty, a)
        object.__setattr__(self, "belief", MappingProxyType(b))
        object.__setattr__(self, "uncertainty", u)
        object.__setattr__(self, "base_rate", a)

    @classmethod
    def from_labels(cls, domain, belief, uncertainty, base_rate=None):
        """Build from a mapping of label (or label collection) to mass."""
        masks = {}
        for labels, mass in belief.items():
            key = domain.mask(labels)
            if key in masks:
                raise InvalidKey(f"set {domain.labels_of(key)} listed twice")
            masks[key] = mass
        return cls(domain, masks, uncertainty, base_rate)

    @classmethod
    def vacuous(cls, domain, base_rate=None):
        return cls(domain, {}, 1.0, base_rate)

    def b(self, x: ValueSet) -> float:
        return self.belief.get(x, 0.0)

    @property
    def is_multinomial(self) -> bool:
        return all(popcount(key) == 1 for key in self.belief)

    def __repr__(self):
        b = ", ".join(
            f"{'|'.join(self.domain.labels_of(key))}: {mass:.6g}"
            for key, mass in self.belief.items()
        )
        return f"{type(self).__name__}({{{b}}}, u={self.uncertainty:.6g}, a={self.base_rate})"


class MultinomialOpinion(HyperOpinion):
    """A hyper opinion whose belief support contains only singletons."""

    def __post_init__(self):
        super().__post_init__()
        for key in self.belief:
            if popcount(key) != 1:
                raise InvalidKey(
                    f"multinomial opinion has composite key {self.domain.labels_of(key)}"
                )

    @classmethod
    def from_vector(cls, domain, beliefs: Sequence[float], uncertainty, base_rate=None):
        if len(beliefs) != domain.k:
            raise InvalidKey(f"expected {domain.k} belief masses, got {len(beliefs)}")
        return cls(domain, {1 << i: m for i, m in enumerate(beliefs)}, uncertainty, base_rate)

    @classmethod
    def from_hyper(cls, op: HyperOpinion) -> MultinomialOpinion:
        if isinstance(op, MultinomialOpinion):
            return op
        if not op.is_multinomial:
            raise HyperInputUnsupported("opinion has belief on composite sets")
        return cls(op.domain, op.belief, op.uncertainty, op.base_rate)

    def vector(self) -> tuple[float, ...]:
        return tuple(self.belief.get(1 << i, 0.0) for i in range(self.domain.k))


def validate(op: HyperOpinion) -> HyperOpinion:
    """Re-check every invariant of ``op``; returns it unchanged on success."""
    validate_components(op.domain, op.belief, op.uncertainty, op.base_rate)
    if isinstance(op, MultinomialOpinion) and not op.is_multinomial:
        raise InvalidKey("multinomial opinion has composite keys")
    return op


def is_dogmatic(op: HyperOpinion) -> bool:
    return op.uncertainty == 0.0


def is_vacuous(op: HyperOpinion) -> bool:
    return op.uncertainty == 1.0


def project_probability(op: HyperOpinion) -> ProjectedDistribution:
    """P(x) = b(x) + a(x) u for every singleton x."""
    if not op.is_multinomial:
        raise HyperInputUnsupported("use project_probability_hyper for composite beliefs")
    u = op.uncertainty
    return tuple(op.b(1 << i) + a * u for i, a in enumerate(op.base_rate))


def base_rate_of_set(a: BaseRate, y: ValueSet) -> float:
    """Additive extension of a singleton base rate to the set ``y``."""
    if y == 0:
        raise EmptySet("base rate of the empty set is undefined")
    return math.fsum(a[i] for i in members(y))


def project_probability_hyper(op: HyperOpinion) -> ProjectedDistribution:
    """Projected singleton probabilities of a hyper opinion.

    Composite belief is split among its members in proportion to their base
    rates: P(x) = sum_{y contains x} a(x)/a(y) b(y) + a(x) u.
    """
    a = op.base_rate
    p = [ai * op.uncertainty for ai in a]
    for y, mass in op.belief.items():
        ay = base_rate_of_set(a, y)
        if ay == 0.0:
            raise ZeroBaseRateSet(f"set {op.domain.labels_of(y)} has zero base rate")
        for i in members(y):
            p[i] += a[i] / ay * mass
    return tuple(p)


def relative_base_rate(a: BaseRate, y: ValueSet, others: Sequence[ValueSet]) -> float:
    """Base rate of ``y`` conditioned on the intersection of ``others``.

    Returns a(y & C) / a(C) with C the intersection of ``others``; zero when C
    or y & C is empty, or when a(C) is zero.
    """
    if y == 0 or not others or any(o == 0 for o in others):
        raise EmptySet("relative base rate needs non-empty sets")
    c = others[0]
    for o in others[1:]:
        c &= o
    if c == 0 or y & c == 0:
        return 0.0
    ac = base_rate_of_set(a, c)
    if ac == 0.0:
        return 0.0
    return base_rate_of_set(a, y & c) / ac


def uncertainty_maximize(op: HyperOpinion) -> MultinomialOpinion:
    """Raise u as far as possible while keeping the projected probability.

    u' = min(1, min_x P(x)/a(x)) over singletons with a(x) > 0, and
    b'(x) = P(x) - a(x) u'.  The minimizing singleton ends with zero belief.
    """
    op = MultinomialOpinion.from_hyper(op)
    a = op.base_rate
    p = project_probability(op)
    ratios = [(p[i] / a[i], i) for i in range(len(a)) if a[i] > 0.0]
    u, argmin = min(ratios)
    if u >= 1.0:
        return MultinomialOpinion(op.domain, {}, 1.0, a)
    belief = {}
    for i, (pi, ai) in enumerate(zip(p, a)):
        if i == argmin:
            continue
        belief[1 << i] = max(pi - ai * u, 0.0)
    return MultinomialOpinion(op.domain, belief, u, a)

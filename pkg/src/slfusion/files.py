"""JSON opinion and evidence files.

Opinion file::

    {"domain": ["x", "not_x"],
     "opinions": [{"actor": "A1",
                   "belief": [{"set": ["x"], "mass": 0.1}, {"set": ["not_x"], "mass": 0.3}],
                   "uncertainty": 0.6,
                   "base_rate": {"x": 0.5, "not_x": 0.5}}]}

Evidence file: same layout with an ``"evidence"`` list whose records hold
``"r": [{"set": [...], "value": ...}]``, ``"base_rate"`` and ``"W"``.
Sets are label lists; order does not matter but duplicates are rejected.
A missing ``base_rate`` means uniform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import Domain, HyperOpinion, project_probability_hyper, uniform_base_rate
from .dirichlet import DEFAULT_PRIOR_WEIGHT, EvidenceRecord
from .errors import InputError, SLError, ZeroBaseRateSet


@dataclass(frozen=True)
class OpinionFile:
    domain: Domain
    actors: tuple[str, ...]
    opinions: tuple[HyperOpinion, ...]


@dataclass(frozen=True)
class EvidenceFile:
    domain: Domain
    actors: tuple[str, ...]
    records: tuple[EvidenceRecord, ...]


def _read_json(source):
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from None
    else:
        text = source.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def _domain(doc) -> Domain:
    if not isinstance(doc, dict):
        raise InputError("top level must be an object")
    labels = doc.get("domain")
    if not isinstance(labels, list):
        raise InputError("'domain' must be a list of labels")
    try:
        return Domain(tuple(labels))
    except SLError as exc:
        raise InputError(f"InvalidDomain: {exc}") from None


def _set_entries(domain, entries, value_key):
    if not isinstance(entries, list):
        raise InputError(f"expected a list of {{set, {value_key}}} entries")
    out = {}
    for entry in entries:
        if not isinstance(entry, dict) or "set" not in entry or value_key not in entry:
            raise InputError(f"entry {entry!r} needs 'set' and '{value_key}'")
        labels = entry["set"]
        if not isinstance(labels, list) or not all(isinstance(v, str) for v in labels):
            raise InputError(f"'set' must be a list of labels, got {labels!r}")
        key = domain.mask(labels)
        if key in out:
            raise InputError(f"set {sorted(labels)} listed twice")
        out[key] = _number(entry[value_key], value_key)
    return out


def _number(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"'{name}' must be a number, got {value!r}")
    return float(value)


def _base_rate(domain, raw):
    if raw is None:
        return uniform_base_rate(domain)
    if not isinstance(raw, dict):
        raise InputError("'base_rate' must map labels to numbers")
    unknown = set(raw) - set(domain.labels)
    if unknown:
        raise InputError(f"base rate names unknown labels {sorted(unknown)}")
    return tuple(_number(raw.get(label, 0.0), "base_rate") for label in domain.labels)


def _records(doc, list_key):
    domain = _domain(doc)
    records = doc.get(list_key)
    if not isinstance(records, list):
        raise InputError(f"'{list_key}' must be a list")
    if not records:
        raise InputError(f"EmptyInput: no {list_key} in file")
    return domain, records


def _actor(record, position, seen):
    if not isinstance(record, dict):
        raise InputError(f"#{position}: record must be an object")
    actor = record.get("actor")
    if not isinstance(actor, str) or not actor:
        raise InputError(f"#{position}: missing 'actor' name")
    if actor in seen:
        raise InputError(f"{actor}: duplicate actor name")
    seen.add(actor)
    return actor


def parse_opinions(doc) -> OpinionFile:
    """Build validated opinions from a decoded document.

    Every record is checked; all problems are reported together.
    """
    domain, records = _records(doc, "opinions")
    problems, actors, opinions, seen = [], [], [], set()
    for position, record in enumerate(records):
        try:
            actor = _actor(record, position, seen)
        except InputError as exc:
            problems.extend(exc.problems)
            continue
        try:
            belief = _set_entries(domain, record.get("belief", []), "mass")
            u = _number(record.get("uncertainty"), "uncertainty")
            a = _base_rate(domain, record.get("base_rate"))
            opinions.append(HyperOpinion(domain, belief, u, a))
            actors.append(actor)
        except InputError as exc:
            problems.extend(f"{actor}: {p}" for p in exc.problems)
        except SLError as exc:
            problems.append(f"{actor}: {type(exc).__name__}: {exc}")
    if problems:
        raise InputError(problems)
    return OpinionFile(domain, tuple(actors), tuple(opinions))


def parse_evidence(doc) -> EvidenceFile:
    domain, records = _records(doc, "evidence")
    problems, actors, out, seen = [], [], [], set()
    for position, record in enumerate(records):
        try:
            actor = _actor(record, position, seen)
        except InputError as exc:
            problems.extend(exc.problems)
            continue
        try:
            r = _set_entries(domain, record.get("r", []), "value")
            a = _base_rate(domain, record.get("base_rate"))
            w = _number(record.get("W", DEFAULT_PRIOR_WEIGHT), "W")
            out.append(EvidenceRecord(domain, r, a, w))
            actors.append(actor)
        except InputError as exc:
            problems.extend(f"{actor}: {p}" for p in exc.problems)
        except SLError as exc:
            problems.append(f"{actor}: {type(exc).__name__}: {exc}")
    if problems:
        raise InputError(problems)
    return EvidenceFile(domain, tuple(actors), tuple(out))


def load_opinions(source) -> OpinionFile:
    return parse_opinions(_read_json(source))


def load_evidence(source) -> EvidenceFile:
    return parse_evidence(_read_json(source))


def _sets(domain, mapping, value_key):
    return [{"set": list(domain.labels_of(x)), value_key: v} for x, v in mapping.items()]


def opinion_record(actor: str, op: HyperOpinion) -> dict:
    return {
        "actor": actor,
        "belief": _sets(op.domain, op.belief, "mass"),
        "uncertainty": op.uncertainty,
        "base_rate": dict(zip(op.domain.labels, op.base_rate)),
    }


def evidence_record(actor: str, ev: EvidenceRecord) -> dict:
    return {
        "actor": actor,
        "r": _sets(ev.domain, ev.r, "value"),
        "base_rate": dict(zip(ev.domain.labels, ev.base_rate)),
        "W": ev.prior_weight,
    }


def opinions_document(domain, actors, opinions, projected=False) -> dict:
    doc = {
        "domain": list(domain.labels),
        "opinions": [opinion_record(a, op) for a, op in zip(actors, opinions)],
    }
    if projected and len(opinions) == 1:
        try:
            p = project_probability_hyper(opinions[0])
            doc["projected"] = dict(zip(domain.labels, p))
        except ZeroBaseRateSet:
            doc["projected"] = None
    return doc


def evidence_document(domain, actors, records) -> dict:
    return {
        "domain": list(domain.labels),
        "evidence": [evidence_record(a, ev) for a, ev in zip(actors, records)],
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


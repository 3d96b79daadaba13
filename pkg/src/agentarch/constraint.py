"""Scopes, constraint records and the registry of constraint kinds."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

__all__ = [
    "Status",
    "Verdict",
    "RefKind",
    "Ref",
    "ScopeRef",
    "ConstraintKind",
    "Constraint",
    "UnknownRef",
    "KIND_PARAMS",
    "constraint_registry_list",
    "scope_resolve",
    "combine",
]


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_EVALUABLE = "not_evaluable"


@dataclass
class Verdict:
    status: Status
    residuals: dict[str, float] = field(default_factory=dict)
    evidence: list[str] = field(default_factory=list)
    name: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.PASS

    @classmethod
    def passed(cls, name="", evidence=(), **residuals) -> "Verdict":
        return cls(Status.PASS, dict(residuals), list(evidence), name)

    @classmethod
    def failed(cls, name="", evidence=(), **residuals) -> "Verdict":
        return cls(Status.FAIL, dict(residuals), list(evidence), name)

    @classmethod
    def skipped(cls, name="", evidence=(), **residuals) -> "Verdict":
        return cls(Status.NOT_EVALUABLE, dict(residuals), list(evidence), name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "evidence": list(self.evidence),
        }


def combine(name: str, parts: Iterable[Verdict]) -> Verdict:
    """Conjunction; not_evaluable parts are reported but do not block."""
    parts = list(parts)
    residuals: dict[str, float] = {}
    evidence: list[str] = []
    status = Status.PASS
    for p in parts:
        for k, v in p.residuals.items():
            residuals[f"{p.name}.{k}" if p.name else k] = v
        evidence.extend(f"[{p.name}] {line}" if p.name else line for line in p.evidence)
        if p.status is Status.FAIL:
            status = Status.FAIL
    return Verdict(status, residuals, evidence, name)


class RefKind(str, Enum):
    SYN_TYPE = "syn_type"
    KNOW_TYPE = "know_type"
    SYN_GEN = "syn_gen"
    KNOW_GEN = "know_gen"
    PAIR = "pair"


@dataclass(frozen=True, order=True)
class Ref:
    """A scope entry. ``kind`` is None until resolved against an architecture;
    for pairs ``name`` holds ``"S,K"``."""

    name: str
    kind: RefKind | None = None


@dataclass(frozen=True)
class ScopeRef:
    refs: frozenset[Ref]

    @classmethod
    def of(cls, *names: str) -> "ScopeRef":
        return cls(frozenset(Ref(n) for n in names))

    def names(self) -> frozenset[str]:
        return frozenset(r.name for r in self.refs)


class ConstraintKind(str, Enum):
    REPRESENTABILITY = "Representability"
    FIXED_POINT = "FixedPoint"
    POLICY_VALUE_COMPAT = "PolicyValueCompat"
    MARKOV_FACTORIZATION = "MarkovFactorization"
    ONTOLOGICAL_FACTORIZATION = "OntologicalFactorization"
    UNCHECKED = "Unchecked"


# required params per kind; the values name what each param holds
KIND_PARAMS: dict[ConstraintKind, dict[str, str]] = {
    ConstraintKind.REPRESENTABILITY: {"carrier": "knowledge type", "shape_of": "syntax type list"},
    ConstraintKind.FIXED_POINT: {
        "carrier": "knowledge type",
        "gamma": "discount bound",
        "tol": "oracle tolerance",
        "max_iter": "oracle iteration cap",
    },
    ConstraintKind.POLICY_VALUE_COMPAT: {"policy": "syntax generator", "carrier": "knowledge type"},
    ConstraintKind.MARKOV_FACTORIZATION: {"interaction_generator": "syntax generator"},
    ConstraintKind.ONTOLOGICAL_FACTORIZATION: {"type": "syntax type", "factors": "count"},
    ConstraintKind.UNCHECKED: {"prose": "text"},
}

# params whose values are symbol names and therefore renamed by transport
SYMBOL_PARAMS = {"carrier", "shape_of", "policy", "interaction_generator", "type"}


class UnknownRef(KeyError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"unknown scope references: {', '.join(self.names)}")


@dataclass(frozen=True)
class Constraint:
    id: str
    kind: ConstraintKind
    scope: ScopeRef
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ConstraintKind(self.kind))
        items = self.params.items() if isinstance(self.params, dict) else self.params
        object.__setattr__(
            self, "params", tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in items))
        )
        missing = set(KIND_PARAMS[self.kind]) - set(self.param_dict)
        if missing:
            raise ValueError(f"constraint {self.id}: missing params {sorted(missing)}")
        if self.kind is ConstraintKind.UNCHECKED and set(self.param_dict) != {"prose"}:
            raise ValueError(f"constraint {self.id}: Unchecked carries only prose")

    @property
    def param_dict(self) -> dict[str, Any]:
        return dict(self.params)

    def param(self, key: str, default=None):
        return self.param_dict.get(key, default)


def constraint_registry_list() -> list[tuple[str, tuple[str, ...]]]:
    return [(k.value, tuple(sorted(v))) for k, v in KIND_PARAMS.items()]


def scope_resolve(arch, s: ScopeRef) -> frozenset[Ref]:
    """Attach a kind to every reference or raise UnknownRef.

    Bare names are looked up in all four symbol tables; a name found in more
    than one table is ambiguous unless the reference carries a kind.
    """
    tables = {
        RefKind.SYN_TYPE: {t.name for t in arch.syn.types},
        RefKind.KNOW_TYPE: {t.name for t in arch.know.types},
        RefKind.SYN_GEN: {g.name for g in arch.syn.generators},
        RefKind.KNOW_GEN: {g.name for g in arch.know.generators},
    }
    pairs = {f"{a.name},{b.name}" for a, b in arch.iface.support}
    out: set[Ref] = set()
    bad: list[str] = []
    for r in s.refs:
        if r.kind is RefKind.PAIR or (r.kind is None and "," in r.name):
            if r.name in pairs:
                out.add(Ref(r.name, RefKind.PAIR))
            else:
                bad.append(r.name)
            continue
        if r.kind is not None:
            if r.name in tables.get(r.kind, ()):
                out.add(r)
            else:
                bad.append(f"{r.kind.value}:{r.name}")
            continue
        hits = [k for k, names in tables.items() if r.name in names]
        if len(hits) == 1:
            out.add(Ref(r.name, hits[0]))
        else:
            bad.append(r.name if not hits else f"{r.name} (ambiguous)")
    if bad:
        raise UnknownRef(bad)
    return frozenset(out)

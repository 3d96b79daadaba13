"""Built-in case-study architectures, the extension ladder, and their analyses.

The encodings live as DSL files under ``data/corpus``; this module parses
them once and answers structural questions about the results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .archcat import Architecture, ArchMorphism, arch_validate, morphism_compose, morphism_validate
from .constraint import ConstraintKind
from .diagram import LoopReport, og_loop_carriers
from .interface import (
    ModularityReport,
    Partition,
    knowledge_compatible_generators,
    modularity_report,
    render_support_table,
    support_matrix,
)

__all__ = [
    "NAMES",
    "LADDER",
    "UnknownName",
    "AnalysisReport",
    "ComparisonRow",
    "builtin",
    "builtin_morphism",
    "corpus_path",
    "env_path",
    "load_env",
    "analyze",
    "analyze_architecture",
    "ladder",
    "ladder_composite",
    "compare",
    "render_comparison",
    "report_json",
    "validate_ladder",
]

NAMES = ("RL", "CRL", "STEP1", "STEP2", "STEP3", "STEP4", "STEP5", "SBL", "AIXI")
LADDER = ("RL", "STEP1", "STEP2", "STEP3", "STEP4", "STEP5", "SBL")
_FILES = {n: n.lower() + ".arch" for n in NAMES}


class UnknownName(KeyError):
    pass


def corpus_path(filename: str):
    return resources.files("agentarch").joinpath("data", "corpus", filename)


def env_path(filename: str):
    if not filename.endswith(".env"):
        filename += ".env"
    return resources.files("agentarch").joinpath("data", "envs", filename)


def load_env(name: str):
    from .dsl.envfile import parse_env

    p = env_path(name)
    if not p.is_file():
        raise UnknownName(name)
    return parse_env(p.read_text(encoding="utf-8"), name.removesuffix(".env"))


@lru_cache(maxsize=None)
def builtin(name: str) -> Architecture:
    from .dsl import parse_document

    if name not in _FILES:
        raise UnknownName(f"no built-in architecture {name!r}; known: {', '.join(NAMES)}")
    doc = parse_document(corpus_path(_FILES[name]).read_text(encoding="utf-8"))
    return doc.architecture(name)


@lru_cache(maxsize=None)
def _morphisms() -> dict[str, ArchMorphism]:
    from .dsl import parse_document

    doc = parse_document(corpus_path("ladder.morph").read_text(encoding="utf-8"), lookup=_lookup)
    return {m.name: m for m in doc.morphisms}


def _lookup(name: str):
    return builtin(name) if name in _FILES else None


def builtin_morphism(name: str) -> ArchMorphism:
    ms = _morphisms()
    if name not in ms:
        raise UnknownName(f"no built-in morphism {name!r}; known: {', '.join(ms)}")
    return ms[name]


def ladder() -> list[tuple[Architecture, ArchMorphism]]:
    """Each rung paired with the morphism leaving it, RL first."""
    return [
        (builtin(a), builtin_morphism(f"{a}_to_{b}"))
        for a, b in zip(LADDER, LADDER[1:])
    ]


def ladder_composite() -> ArchMorphism:
    steps = [F for _, F in ladder()]
    out = steps[0]
    for F in steps[1:]:
        out = morphism_compose(out, F)
    return out


# ------------------------------------------------------------------ analysis


@dataclass
class AnalysisReport:
    name: str
    valid: bool
    loop_report: LoopReport
    support_table: str
    support: dict
    partition: Partition
    modularity: ModularityReport
    constraints: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        lr = self.loop_report
        return {
            "architecture": self.name,
            "valid": self.valid,
            "loops": {
                "total": lr.total_cycles,
                "per_carrier": {t.name: n for t, n in lr.cycle_count_per_carrier.items()},
            },
            "support": self.support,
            "support_table": self.support_table,
            "partition": {
                "compatible": list(self.partition.compatible),
                "agnostic": list(self.partition.agnostic),
            },
            "modularity": {
                "knowledge_carrier_types": self.modularity.knowledge_carrier_types,
                "supported_pairs": self.modularity.supported_pairs,
            },
            "constraints": self.constraints,
            "notes": self.notes,
        }

    def to_text(self) -> str:
        lr = self.loop_report
        per = ", ".join(f"{t.name}: {n}" for t, n in lr.cycle_count_per_carrier.items()) or "none"
        lines = [
            f"architecture {self.name} ({'valid' if self.valid else 'INVALID'})",
            f"carrier loops: {lr.total_cycles} ({per})",
            f"knowledge-compatible generators: {', '.join(self.partition.compatible) or 'none'}",
            f"knowledge-agnostic generators: {', '.join(self.partition.agnostic) or 'none'}",
            f"knowledge carrier types: {self.modularity.knowledge_carrier_types}, "
            f"supported pairs: {self.modularity.supported_pairs}",
            "support table:",
            *("  " + ln for ln in self.support_table.rstrip("\n").split("\n")),
        ]
        if self.constraints:
            lines.append("constraints:")
            for c in self.constraints:
                flag = "evaluable" if c["evaluable"] else "not evaluable"
                lines.append(f"  {c['id']} [{c['kind']}] {flag}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"

    @property
    def supported_rows(self) -> int:
        return sum(1 for row in self.support["cells"] if any(row))


def analyze_architecture(A: Architecture) -> AnalysisReport:
    from .semantics import _EVALUATORS

    loops = og_loop_carriers(A.pattern.pattern, A.carriers())
    cons = [
        {
            "id": c.id,
            "kind": c.kind.value,
            "evaluable": c.kind is not ConstraintKind.UNCHECKED and c.kind in _EVALUATORS,
        }
        for c in A.constraints
    ]
    notes = list(A.notes)
    for layer, pres in (("syntax", A.syn), ("knowledge", A.know)):
        for g in pres.generators:
            if not g.dom:
                notes.append(f"{layer} generator {g.name} has monoidal-unit domain (encoded with no inputs)")
    return AnalysisReport(
        A.name,
        arch_validate(A).ok,
        loops,
        render_support_table(A),
        support_matrix(A),
        knowledge_compatible_generators(A),
        modularity_report(A),
        cons,
        notes,
    )


def analyze(name: str) -> AnalysisReport:
    return analyze_architecture(builtin(name))


# ------------------------------------------------------------------ comparison

_DIMENSIONS = (
    "Persistent information structure",
    "Feedback structure",
    "Causal structure",
    "Information reuse",
    "Continual learning support",
    "Interface typing",
    "Body-Mind mediation",
    "Locality of updates",
)

# cells of the published comparison table, in dimension order
_TABLE = {
    "RL": (
        "Undifferentiated carrier Θ",
        "Single endomorphic loop",
        "Not represented",
        "Not supported",
        "Limited",
        "Monolithic",
        "None",
        "Global",
    ),
    "CRL": (
        "(Θπ, ΘCS)",
        "Two coupled endomorphic loops",
        "Explicit causal model",
        "Restricted",
        "Partial",
        "Weakly typed",
        "None",
        "Role-based",
    ),
    "SBL": (
        "Family of schemas Σ",
        "Multiple decoupled loops",
        "Modular causal schemas",
        "Compositional and reusable",
        "Architectural",
        "Strongly typed and factored",
        "Explicit architectural layer",
        "Schema-local",
    ),
}


@dataclass(frozen=True)
class ComparisonRow:
    dimension: str
    a: str
    b: str
    source: str  # computed | quoted
    quoted_a: str = "n/a"
    quoted_b: str = "n/a"

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "a": self.a,
            "b": self.b,
            "source": self.source,
            "quoted_a": self.quoted_a,
            "quoted_b": self.quoted_b,
        }


def _computed(dim: str, r: AnalysisReport) -> str | None:
    if dim == "Feedback structure":
        n = r.loop_report.total_cycles
        return f"{n} carrier loop{'s' if n != 1 else ''}"
    if dim == "Interface typing":
        m = r.modularity
        return f"{m.knowledge_carrier_types} knowledge types, {m.supported_pairs} supported pairs"
    return None


def compare(a: str, b: str) -> list[ComparisonRow]:
    ra, rb = analyze(a), analyze(b)
    rows = []
    for i, dim in enumerate(_DIMENSIONS):
        qa = _TABLE[a][i] if a in _TABLE else "n/a"
        qb = _TABLE[b][i] if b in _TABLE else "n/a"
        ca, cb = _computed(dim, ra), _computed(dim, rb)
        if ca is not None:
            rows.append(ComparisonRow(dim, ca, cb, "computed", qa, qb))
        else:
            rows.append(ComparisonRow(dim, qa, qb, "quoted", qa, qb))
    return rows


def render_comparison(a: str, b: str, rows: list[ComparisonRow]) -> str:
    table = [["Dimension", a, b, "source"]] + [[r.dimension, r.a, r.b, r.source] for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(4)]
    return "\n".join(" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table) + "\n"


def report_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False)


def validate_ladder() -> list[tuple[str, object]]:
    """Verdict for each rung and for the composite."""
    out = [(F.name, morphism_validate(F)) for _, F in ladder()]
    C = ladder_composite()
    out.append((C.name, morphism_validate(C)))
    return out

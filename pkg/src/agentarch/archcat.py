"""Architectures, architecture morphisms, composition and constraint transport."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .constraint import (
    SYMBOL_PARAMS,
    Constraint,
    ConstraintKind,
    Ref,
    RefKind,
    ScopeRef,
    UnknownRef,
    Verdict,
    combine,
    scope_resolve,
)
from .diagram import (
    DiagramError,
    OpenHypergraph,
    TypeSymbol,
    og_equal,
    og_generator,
    og_substitute,
)
from .interface import RelationalInterface, knowledge_projection
from .signature import HypergraphPresentation, SyntaxPattern, diagram_validate, presentation_validate

__all__ = [
    "Architecture",
    "ArchMorphism",
    "MiddleMismatch",
    "arch_validate",
    "binding_problems",
    "morphism_validate",
    "morphism_compose",
    "morphism_identity",
    "morphism_apply",
    "constraint_transport",
    "arch_equal",
]


@dataclass(frozen=True)
class Architecture:
    name: str
    syn: HypergraphPresentation
    pattern: SyntaxPattern
    know: HypergraphPresentation
    iface: RelationalInterface
    constraints: tuple[Constraint, ...] = ()
    # types whose spiders may be read as addition / zero in the semantic backend
    notes: tuple[str, ...] = field(default=(), compare=False)

    def constraint(self, cid: str) -> Constraint:
        for c in self.constraints:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def carriers(self) -> list[TypeSymbol]:
        """Syntax types with at least one supported knowledge partner."""
        sup = {s for s, _ in self.iface.support}
        return [t for t in self.syn.types if t in sup]


def binding_problems(arch: Architecture) -> list[str]:
    """Check each binding k_g against the knowledge projection of g's profile."""
    out = []
    phi = arch.iface
    for gname, kd in phi.bindings.items():
        if not arch.syn.has_generator(gname):
            out.append(f"binding for undeclared generator {gname}")
            continue
        g = arch.syn.generator_named(gname)
        out += [f"binding {gname}: {m}" for m in diagram_validate(kd, arch.know)]
        for side, xs, ks in (("dom", g.dom, kd.dom), ("cod", g.cod, kd.cod)):
            proj = knowledge_projection(phi, xs)
            positions = sorted({i for i, _ in proj})
            if len(positions) != len(ks):
                out.append(f"binding {gname}: {side} has {len(ks)} knowledge ports, expected {len(positions)}")
                continue
            allowed = {(i, k) for i, k in proj}
            for i, k in zip(positions, ks):
                if (i, k) not in allowed:
                    out.append(f"binding {gname}: {side} port {i} type {k.name} is not supported against {xs[i].name}")
    return out


def arch_validate(A: Architecture) -> Verdict:
    parts = []
    for label, p in (("syntax", A.syn), ("knowledge", A.know)):
        v = presentation_validate(p)
        v.name = label
        parts.append(v)
    pat = diagram_validate(A.pattern.pattern, A.syn)
    parts.append(Verdict.failed("pattern", pat) if pat else Verdict.passed("pattern"))
    iface = []
    st, kt = set(A.syn.types), set(A.know.types)
    for s, k in sorted(A.iface.support):
        if s not in st:
            iface.append(f"support pair references undeclared syntax type {s.name}")
        if k not in kt:
            iface.append(f"support pair references undeclared knowledge type {k.name}")
    iface += binding_problems(A)
    parts.append(Verdict.failed("interface", iface) if iface else Verdict.passed("interface"))
    cons = []
    seen = set()
    for c in A.constraints:
        if c.id in seen:
            cons.append(f"duplicate constraint id {c.id}")
        seen.add(c.id)
        try:
            scope_resolve(A, c.scope)
        except UnknownRef as e:
            cons.append(f"{c.id}: UnknownRef {', '.join(e.names)}")
    parts.append(Verdict.failed("constraints", cons) if cons else Verdict.passed("constraints"))
    return combine(f"arch {A.name}", parts)


@dataclass(frozen=True)
class ArchMorphism:
    name: str
    source: Architecture
    target: Architecture
    type_map_syn: dict
    gen_map_syn: dict
    type_map_know: dict
    gen_map_know: dict

    def syn_type(self, t) -> TypeSymbol:
        return TypeSymbol(self.type_map_syn[t.name if isinstance(t, TypeSymbol) else t])

    def know_type(self, t) -> TypeSymbol:
        return TypeSymbol(self.type_map_know[t.name if isinstance(t, TypeSymbol) else t])

    def scope_map(self) -> dict[tuple[RefKind, str], frozenset[tuple[RefKind, str]]]:
        """Where each source symbol lands; a generator lands on the labels of its image."""
        m = {}
        for a, b in self.type_map_syn.items():
            m[(RefKind.SYN_TYPE, a)] = frozenset({(RefKind.SYN_TYPE, b)})
        for a, b in self.type_map_know.items():
            m[(RefKind.KNOW_TYPE, a)] = frozenset({(RefKind.KNOW_TYPE, b)})
        for a, d in self.gen_map_syn.items():
            m[(RefKind.SYN_GEN, a)] = frozenset((RefKind.SYN_GEN, e.label.name) for e in d.edges)
        for a, d in self.gen_map_know.items():
            m[(RefKind.KNOW_GEN, a)] = frozenset((RefKind.KNOW_GEN, e.label.name) for e in d.edges)
        return m


class MiddleMismatch(ValueError):
    pass


def _check_layer(label, src: HypergraphPresentation, dst: HypergraphPresentation, tmap, gmap):
    problems = []
    for t in src.types:
        img = tmap.get(t.name)
        if img is None:
            problems.append(f"{label}: type {t.name} is not mapped")
        elif not dst.has_type(img):
            problems.append(f"{label}: type {t.name} maps to undeclared {img}")
    for g in src.generators:
        d = gmap.get(g.name)
        if d is None:
            problems.append(f"{label}: generator {g.name} is not mapped")
            continue
        problems += [f"{label}: image of {g.name}: {m}" for m in diagram_validate(d, dst)]
        try:
            want_dom = tuple(TypeSymbol(tmap[t.name]) for t in g.dom)
            want_cod = tuple(TypeSymbol(tmap[t.name]) for t in g.cod)
        except KeyError:
            continue
        if d.dom != want_dom:
            problems.append(
                f"{label}: image of {g.name} has domain {_show(d.dom)}, expected {_show(want_dom)}"
            )
        if d.cod != want_cod:
            problems.append(
                f"{label}: image of {g.name} has codomain {_show(d.cod)}, expected {_show(want_cod)}"
            )
    extra = set(gmap) - {g.name for g in src.generators}
    problems += [f"{label}: map mentions unknown generator {n}" for n in sorted(extra)]
    return problems


def _show(ts) -> str:
    return " * ".join(t.name for t in ts) or "I"


def morphism_validate(F: ArchMorphism, A: Architecture | None = None, B: Architecture | None = None) -> Verdict:
    A = A or F.source
    B = B or F.target
    syn = _check_layer("syntax", A.syn, B.syn, F.type_map_syn, F.gen_map_syn)
    know = _check_layer("knowledge", A.know, B.know, F.type_map_know, F.gen_map_know)
    nat = []
    for s, k in sorted(A.iface.support):
        fs, fk = F.type_map_syn.get(s.name), F.type_map_know.get(k.name)
        if fs is None or fk is None:
            continue
        if (TypeSymbol(fs), TypeSymbol(fk)) not in B.iface.support:
            nat.append(f"support ({s.name},{k.name}) maps to unsupported ({fs},{fk})")
    parts = [
        Verdict.failed("syntax typing", syn) if syn else Verdict.passed("syntax typing"),
        Verdict.failed("knowledge typing", know) if know else Verdict.passed("knowledge typing"),
        Verdict.failed("interface naturality", nat) if nat else Verdict.passed("interface naturality"),
    ]
    return combine(f"morphism {F.name}", parts)


def morphism_apply(F: ArchMorphism, d: OpenHypergraph, layer: str = "syn") -> OpenHypergraph:
    """Action of F on an arbitrary diagram, by substituting generator images."""
    if layer == "syn":
        tmap, gmap = F.type_map_syn, F.gen_map_syn
    else:
        tmap, gmap = F.type_map_know, F.gen_map_know
    return og_substitute(d, gmap, {a: TypeSymbol(b) for a, b in tmap.items()})


def morphism_identity(A: Architecture) -> ArchMorphism:
    return ArchMorphism(
        f"id_{A.name}",
        A,
        A,
        {t.name: t.name for t in A.syn.types},
        {g.name: og_generator(g) for g in A.syn.generators},
        {t.name: t.name for t in A.know.types},
        {g.name: og_generator(g) for g in A.know.generators},
    )


def morphism_compose(F: ArchMorphism, G: ArchMorphism) -> ArchMorphism:
    """G after F, written F;G."""
    if F.target.name != G.source.name:
        raise MiddleMismatch(f"{F.name} lands in {F.target.name} but {G.name} starts at {G.source.name}")
    return ArchMorphism(
        f"{F.name};{G.name}",
        F.source,
        G.target,
        {a: G.type_map_syn[b] for a, b in F.type_map_syn.items()},
        {a: morphism_apply(G, d, "syn") for a, d in F.gen_map_syn.items()},
        {a: G.type_map_know[b] for a, b in F.type_map_know.items()},
        {a: morphism_apply(G, d, "know") for a, d in F.gen_map_know.items()},
    )


def _rename_value(v, names: dict[str, str]):
    if isinstance(v, str):
        return names.get(v, v)
    if isinstance(v, (list, tuple)):
        return type(v)(_rename_value(x, names) for x in v)
    return v


def _rename_prose(text: str, names: dict[str, str]) -> str:
    if not names:
        return text
    pat = re.compile(r"\b(" + "|".join(sorted(map(re.escape, names), key=len, reverse=True)) + r")\b")
    return pat.sub(lambda m: names[m.group(1)], text)


def constraint_transport(F: ArchMorphism, rho: Constraint) -> Constraint:
    refs = scope_resolve(F.source, rho.scope)
    smap = F.scope_map()
    new_refs: set[Ref] = set()
    for r in refs:
        if r.kind is RefKind.PAIR:
            s, k = r.name.split(",")
            new_refs.add(Ref(f"{F.type_map_syn[s]},{F.type_map_know[k]}", RefKind.PAIR))
            continue
        for kind, name in smap.get((r.kind, r.name), ()):
            new_refs.add(Ref(name, kind))
    # single-symbol renaming for params and prose; generators go to their
    # image only when the image is a single edge
    names: dict[str, str] = {}
    names.update(F.type_map_syn)
    names.update(F.type_map_know)
    for gm in (F.gen_map_syn, F.gen_map_know):
        for a, d in gm.items():
            labels = {e.label.name for e in d.edges}
            if len(labels) == 1:
                names[a] = labels.pop()
    params = {}
    for k, v in rho.params:
        if k in SYMBOL_PARAMS:
            params[k] = _rename_value(v, names)
        elif k == "prose":
            params[k] = _rename_prose(v, names)
        else:
            params[k] = v
    out = Constraint(rho.id, rho.kind, ScopeRef(frozenset(new_refs)), params)
    return out


def arch_equal(A: Architecture, B: Architecture) -> bool:
    """Equality up to og_equal on diagrams and set equality elsewhere."""

    def pres_eq(p: HypergraphPresentation, q: HypergraphPresentation) -> bool:
        if set(p.types) != set(q.types) or set(p.generators) != set(q.generators):
            return False
        if {g.name: g.family for g in p.generators} != {g.name: g.family for g in q.generators}:
            return False
        if len(p.equations) != len(q.equations):
            return False
        return all(og_equal(a, c) and og_equal(b, d) for (a, b), (c, d) in zip(p.equations, q.equations))

    return (
        A.name == B.name
        and pres_eq(A.syn, B.syn)
        and pres_eq(A.know, B.know)
        and og_equal(A.pattern.pattern, B.pattern.pattern)
        and A.iface.support == B.iface.support
        and A.iface.binding_equal(B.iface)
        and set(A.constraints) == set(B.constraints)
    )

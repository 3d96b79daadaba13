"""Canonical printer for architectures, morphisms and diagrams.

Types print alphabetically, generators in declaration order, support pairs
sorted, and every diagram through its canonical relabelling, so printing is
deterministic and parse(render(x)) re-renders identically.
"""

from __future__ import annotations

from ..archcat import Architecture, ArchMorphism
from ..constraint import Constraint, RefKind
from ..diagram import OpenHypergraph, og_canonical, og_equal, og_generator
from ..signature import HypergraphPresentation

__all__ = ["render", "render_architecture", "render_morphism", "render_diagram", "render_diagram_ast"]

_PREFIX = {
    RefKind.SYN_TYPE: "syn",
    RefKind.KNOW_TYPE: "know",
    RefKind.SYN_GEN: "sgen",
    RefKind.KNOW_GEN: "kgen",
}


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def _tensor(ts) -> str:
    return " * ".join(t.name for t in ts) or "I"


def render_diagram(d: OpenHypergraph) -> str:
    """A diagram as an expression: a bare name or identity when possible, else a net literal."""
    if not d.edges and d.boundary_in == d.boundary_out and len(set(d.boundary_in)) == len(d.wires) == len(d.boundary_in):
        return f"id[{_tensor(d.dom)}]"
    if len(d.edges) == 1 and og_equal(d, og_generator(d.edges[0].label)):
        return d.edges[0].label.name
    c = og_canonical(d).diagram
    seen: set[int] = set()

    def port(w: int, annotate: bool) -> str:
        if annotate and w not in seen:
            seen.add(w)
            return f"w{w}:{c.wires[w].name}"
        seen.add(w)
        return f"w{w}"

    ins = [port(w, True) for w in c.boundary_in]
    body = []
    for e in c.edges:
        args = ", ".join(port(w, False) for w in e.ins)
        res = ", ".join(port(w, False) for w in e.outs)
        body.append(f"{e.label.name}({args}) -> [{res}];")
    outs = [port(w, True) for w in c.boundary_out]
    for w, t in enumerate(c.wires):
        if w not in seen:
            body.append(f"w{w}:{t.name};")
    inner = " ".join(body)
    return f"net [{', '.join(ins)}] -> [{', '.join(outs)}] {{ {inner} }}" if inner else (
        f"net [{', '.join(ins)}] -> [{', '.join(outs)}] {{ }}"
    )


def render_diagram_ast(e) -> str:
    def w(r):
        return f"{r.name}:{r.type.name}" if r.type else r.name

    body = []
    for s in e.body:
        if hasattr(s, "gen"):
            body.append(f"{s.gen}({', '.join(map(w, s.ins))}) -> [{', '.join(map(w, s.outs))}];")
        else:
            body.append(f"{w(s)};")
    inner = " ".join(body)
    return f"net [{', '.join(map(w, e.ins))}] -> [{', '.join(map(w, e.outs))}] {{ {inner} }}".replace("{  }", "{ }")


def _layer(p: HypergraphPresentation, indent: str) -> list[str]:
    out = []
    if p.types:
        out.append(f"{indent}types {{")
        for t in sorted(p.types):
            disp = p.display.get(t.name)
            out.append(f"{indent}  {t.name}{' ' + _quote(disp) if disp is not None else ''};")
        out.append(f"{indent}}}")
    if p.generators:
        out.append(f"{indent}generators {{")
        for g in p.generators:
            fam = f" family {g.family}" if g.family else ""
            out.append(f"{indent}  {g.name} : {_tensor(g.dom)} -> {_tensor(g.cod)}{fam};")
        out.append(f"{indent}}}")
    if p.equations:
        out.append(f"{indent}equations {{")
        for lhs, rhs in p.equations:
            out.append(f"{indent}  {render_diagram(lhs)} = {render_diagram(rhs)};")
        out.append(f"{indent}}}")
    return out


def _value(v) -> str:
    if isinstance(v, bool):
        return _quote(str(v).lower())
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return _quote(v)
    return "[" + ", ".join(_value(x) for x in v) + "]"


def _ref(r) -> str:
    if r.kind is RefKind.PAIR:
        return "(" + ", ".join(r.name.split(",")) + ")"
    if r.kind is not None:
        return f"{_PREFIX[r.kind]}:{r.name}"
    return r.name


def _constraint(c: Constraint) -> str:
    scope = ", ".join(_ref(r) for r in sorted(c.scope.refs, key=lambda r: (r.name, r.kind or "")))
    params = ", ".join(f"{k}={_value(v)}" for k, v in c.params)
    tail = f" params({params})" if params else ""
    return f"{c.kind.value} {_quote(c.id)} scope({scope}){tail};"


def render_architecture(a: Architecture) -> str:
    out = [f"architecture {a.name} {{"]
    out += _layer(a.syn, "  ")
    if a.pattern.pattern.wires:
        out.append(f"  pattern = {render_diagram(a.pattern.pattern)};")
    know = _layer(a.know, "    ")
    if know:
        out += ["  knowledge {", *know, "  }"]
    phi = a.iface
    iface = []
    if phi.support:
        iface.append("    support {")
        iface += [f"      ({s.name}, {k.name});" for s, k in sorted(phi.support)]
        iface.append("    }")
    if phi.bindings:
        iface.append("    bindings {")
        order = [g.name for g in a.syn.generators if g.name in phi.bindings]
        iface += [f"      {g} -> {render_diagram(phi.bindings[g])};" for g in order]
        iface.append("    }")
    if phi.rows or phi.cols:
        cols = ", ".join(c[0] if len(c) == 1 else "(" + ", ".join(c) + ")" for c in phi.cols)
        iface.append(f"    table rows({', '.join(phi.rows)}) cols({cols});")
    if iface:
        out += ["  interface {", *iface, "  }"]
    if a.constraints:
        out.append("  constraints {")
        out += [f"    {_constraint(c)}" for c in a.constraints]
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


def render_morphism(F: ArchMorphism) -> str:
    out = [f"morphism {F.name} : {F.source.name} -> {F.target.name} {{"]
    for a in sorted(F.type_map_syn):
        out.append(f"  type {a} -> {F.type_map_syn[a]};")
    for g in F.source.syn.generators:
        if g.name in F.gen_map_syn:
            out.append(f"  gen {g.name} -> {render_diagram(F.gen_map_syn[g.name])};")
    for a in sorted(F.type_map_know):
        out.append(f"  ktype {a} -> {F.type_map_know[a]};")
    for g in F.source.know.generators:
        if g.name in F.gen_map_know:
            out.append(f"  kgen {g.name} -> {render_diagram(F.gen_map_know[g.name])};")
    out.append("}")
    return "\n".join(out) + "\n"


def render(obj) -> str:
    from ..rl_runtime import EnvSpec
    from .envfile import render_env
    from .parser import Document

    if isinstance(obj, Architecture):
        return render_architecture(obj)
    if isinstance(obj, ArchMorphism):
        return render_morphism(obj)
    if isinstance(obj, OpenHypergraph):
        return render_diagram(obj)
    if isinstance(obj, Document):
        parts = [render_architecture(a) for a in obj.architectures]
        parts += [render_morphism(m) for m in obj.morphisms]
        return "\n".join(parts)
    if isinstance(obj, EnvSpec):
        return render_env(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")

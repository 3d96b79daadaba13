"""Graphviz dot output for diagrams (a convenience, not a UI)."""

from __future__ import annotations

from ..diagram import OpenHypergraph

__all__ = ["to_dot"]


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(d: OpenHypergraph, name: str = "diagram", show=lambda t: t.name) -> str:
    lines = [f'digraph "{_esc(name)}" {{', "  rankdir=LR;", "  node [fontname=Helvetica];"]
    for i, t in enumerate(d.wires):
        lines.append(f'  w{i} [shape=point, xlabel="{_esc(show(t))}"];')
    for j, e in enumerate(d.edges):
        lines.append(f'  e{j} [shape=box, label="{_esc(e.label.name)}"];')
        for port, w in enumerate(e.ins):
            lines.append(f'  w{w} -> e{j} [headlabel="{port}"];')
        for port, w in enumerate(e.outs):
            lines.append(f'  e{j} -> w{w} [taillabel="{port}"];')
    for pos, w in enumerate(d.boundary_in):
        lines.append(f'  in{pos} [shape=plaintext, label="in {pos}"];')
        lines.append(f"  in{pos} -> w{w} [style=dashed];")
    for pos, w in enumerate(d.boundary_out):
        lines.append(f'  out{pos} [shape=plaintext, label="out {pos}"];')
        lines.append(f"  w{w} -> out{pos} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"

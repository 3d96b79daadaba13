"""Boolean relational interface between the syntax and knowledge layers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .diagram import OpenHypergraph, TypeSymbol

__all__ = [
    "RelationalInterface",
    "UndeclaredSymbol",
    "Partition",
    "ModularityReport",
    "support_lookup",
    "knowledge_projection",
    "knowledge_compatible_generators",
    "modularity_report",
    "support_matrix",
    "render_support_table",
]


class UndeclaredSymbol(KeyError):
    pass


def _sym(t) -> TypeSymbol:
    return t if isinstance(t, TypeSymbol) else TypeSymbol(t)


@dataclass(frozen=True)
class RelationalInterface:
    """Support pairs (syntax type, knowledge type) plus designated bindings.

    ``rows`` and ``cols`` fix the layout of the rendered support table; a
    column may group several syntax types, shown as one cell.
    """

    support: frozenset = frozenset()
    bindings: dict = field(default_factory=dict, compare=False, hash=False)
    syn_types: frozenset = frozenset()
    know_types: frozenset = frozenset()
    rows: tuple = ()
    cols: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "support", frozenset((_sym(a), _sym(b)) for a, b in self.support)
        )
        object.__setattr__(self, "syn_types", frozenset(map(_sym, self.syn_types)))
        object.__setattr__(self, "know_types", frozenset(map(_sym, self.know_types)))
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(tuple(c) if not isinstance(c, str) else (c,) for c in self.cols))

    def partners(self, s) -> list[TypeSymbol]:
        s = _sym(s)
        return sorted(k for a, k in self.support if a == s)

    def binding_equal(self, other: "RelationalInterface") -> bool:
        from .diagram import og_equal

        if set(self.bindings) != set(other.bindings):
            return False
        return all(og_equal(self.bindings[k], other.bindings[k]) for k in self.bindings)


def support_lookup(phi: RelationalInterface, X: Sequence, k) -> bool:
    xs = [_sym(x) for x in X]
    k = _sym(k)
    if phi.syn_types or phi.know_types:
        bad = [x.name for x in xs if x not in phi.syn_types]
        if k not in phi.know_types:
            bad.append(k.name)
        if bad:
            raise UndeclaredSymbol(", ".join(bad))
    return any((x, k) in phi.support for x in xs)


def _has_support(phi: RelationalInterface, X) -> bool:
    return any(support_lookup(phi, X, k) for k in phi.know_types or {k for _, k in phi.support})


def knowledge_projection(phi: RelationalInterface, X: Sequence) -> list[tuple[int, TypeSymbol]]:
    """Positions of ``X`` that carry knowledge, with their unique partner.

    A syntax type supported against several knowledge types has no unique
    partner and is reported with each candidate; callers validating bindings
    accept any of them.
    """
    out = []
    for i, x in enumerate(X):
        for k in phi.partners(x):
            out.append((i, k))
    return out


@dataclass(frozen=True)
class Partition:
    compatible: tuple[str, ...]
    agnostic: tuple[str, ...]


def knowledge_compatible_generators(arch) -> Partition:
    phi = arch.iface
    comp, agn = [], []
    for g in arch.syn.generators:
        ok = _has_support(phi, g.dom) and _has_support(phi, g.cod)
        (comp if ok else agn).append(g.name)
    return Partition(tuple(comp), tuple(agn))


@dataclass(frozen=True)
class ModularityReport:
    knowledge_carrier_types: int
    supported_pairs: int


def modularity_report(arch) -> ModularityReport:
    sup = arch.iface.support
    return ModularityReport(len({k for _, k in sup}), len(sup))


def support_matrix(arch) -> dict:
    """Rows and columns of the support table with Boolean cells."""
    phi = arch.iface
    rows = list(phi.rows) or [t.name for t in arch.know.types]
    cols = [list(c) for c in phi.cols] or [[t.name] for t in arch.syn.types]
    cells = [[support_lookup(phi, c, r) for c in cols] for r in rows]
    return {"rows": rows, "cols": cols, "cells": cells}


def render_support_table(arch, yes: str = "✓", no: str = "✗") -> str:
    m = support_matrix(arch)
    show_s, show_k = arch.syn.show, arch.know.show
    header = ["Types"] + [",".join(show_s(t) for t in c) for c in m["cols"]]
    body = [[show_k(r)] + [yes if v else no for v in row] for r, row in zip(m["rows"], m["cells"])]
    table = [header] + body
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table]
    return "\n".join(lines) + "\n"

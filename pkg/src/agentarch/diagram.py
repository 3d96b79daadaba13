"""Open hypergraphs as morphisms of a free hypergraph category.

A diagram is a set of typed wires, a list of labelled hyperedges whose ports
reference wires, and two ordered boundaries. Frobenius structure is absorbed
by the representation: a wire may have any number of producers, consumers and
boundary occurrences, so spider laws hold on the nose and equality reduces to
boundary-respecting isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import networkx as nx

__all__ = [
    "TypeSymbol",
    "GeneratorSymbol",
    "Edge",
    "OpenHypergraph",
    "Canonical",
    "LoopReport",
    "DiagramError",
    "BoundaryTypeMismatch",
    "og_identity",
    "og_generator",
    "og_spider",
    "og_symmetry",
    "og_permutation",
    "og_compose",
    "og_tensor",
    "og_canonical",
    "og_equal",
    "og_loop_carriers",
    "og_substitute",
]


class DiagramError(ValueError):
    """Raised when a diagram violates its structural invariants."""


class BoundaryTypeMismatch(DiagramError):
    def __init__(self, position: int, expected, found):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(
            f"boundary mismatch at position {position}: expected {expected}, found {found}"
        )


@dataclass(frozen=True, order=True)
class TypeSymbol:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise DiagramError("type symbol name must be a nonempty string")

    def __str__(self) -> str:
        return self.name


def _types(ts: Iterable) -> tuple[TypeSymbol, ...]:
    return tuple(t if isinstance(t, TypeSymbol) else TypeSymbol(t) for t in ts)


@dataclass(frozen=True)
class GeneratorSymbol:
    """A typed box. ``family`` groups concrete expansions of one schematic generator."""

    name: str
    dom: tuple[TypeSymbol, ...] = ()
    cod: tuple[TypeSymbol, ...] = ()
    family: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.name:
            raise DiagramError("generator name must be nonempty")
        object.__setattr__(self, "dom", _types(self.dom))
        object.__setattr__(self, "cod", _types(self.cod))

    @property
    def key(self) -> tuple:
        return (self.name, tuple(t.name for t in self.dom), tuple(t.name for t in self.cod))

    def __str__(self) -> str:
        dom = " * ".join(map(str, self.dom)) or "I"
        cod = " * ".join(map(str, self.cod)) or "I"
        return f"{self.name} : {dom} -> {cod}"


@dataclass(frozen=True)
class Edge:
    label: GeneratorSymbol
    ins: tuple[int, ...]
    outs: tuple[int, ...]


@dataclass(frozen=True)
class OpenHypergraph:
    wires: tuple[TypeSymbol, ...]
    edges: tuple[Edge, ...]
    boundary_in: tuple[int, ...]
    boundary_out: tuple[int, ...]

    def __post_init__(self):
        n = len(self.wires)
        for label, ids in (("boundary_in", self.boundary_in), ("boundary_out", self.boundary_out)):
            for w in ids:
                if not 0 <= w < n:
                    raise DiagramError(f"{label} references missing wire {w}")
        for e in self.edges:
            for w in e.ins + e.outs:
                if not 0 <= w < n:
                    raise DiagramError(f"edge {e.label.name} references missing wire {w}")
            if tuple(self.wires[w] for w in e.ins) != e.label.dom:
                raise DiagramError(f"edge {e.label.name}: input ports do not match domain")
            if tuple(self.wires[w] for w in e.outs) != e.label.cod:
                raise DiagramError(f"edge {e.label.name}: output ports do not match codomain")

    @property
    def dom(self) -> tuple[TypeSymbol, ...]:
        return tuple(self.wires[w] for w in self.boundary_in)

    @property
    def cod(self) -> tuple[TypeSymbol, ...]:
        return tuple(self.wires[w] for w in self.boundary_out)

    def labels(self) -> list[GeneratorSymbol]:
        return [e.label for e in self.edges]

    def __rshift__(self, other: "OpenHypergraph") -> "OpenHypergraph":
        return og_compose(self, other)

    def __matmul__(self, other: "OpenHypergraph") -> "OpenHypergraph":
        return og_tensor(self, other)


def og_identity(profile: Sequence) -> OpenHypergraph:
    ts = _types(profile)
    ids = tuple(range(len(ts)))
    return OpenHypergraph(ts, (), ids, ids)


def og_generator(g: GeneratorSymbol) -> OpenHypergraph:
    nd = len(g.dom)
    wires = g.dom + g.cod
    ins = tuple(range(nd))
    outs = tuple(range(nd, len(wires)))
    return OpenHypergraph(wires, (Edge(g, ins, outs),), ins, outs)


def og_spider(t, m: int, n: int) -> OpenHypergraph:
    if m < 0 or n < 0:
        raise DiagramError("spider arities must be nonnegative")
    (ty,) = _types([t])
    return OpenHypergraph((ty,), (), (0,) * m, (0,) * n)


def og_symmetry(p: Sequence, q: Sequence) -> OpenHypergraph:
    ps, qs = _types(p), _types(q)
    np_ = len(ps)
    wires = ps + qs
    outs = tuple(range(np_, len(wires))) + tuple(range(np_))
    return OpenHypergraph(wires, (), tuple(range(len(wires))), outs)


def og_permutation(profile: Sequence, perm: Sequence[int]) -> OpenHypergraph:
    """Output position j carries input position ``perm[j]``."""
    ts = _types(profile)
    if sorted(perm) != list(range(len(ts))):
        raise DiagramError("not a permutation")
    return OpenHypergraph(ts, (), tuple(range(len(ts))), tuple(int(x) for x in perm))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _quotient(wires, edges, bin_, bout, uf: _UnionFind) -> OpenHypergraph:
    remap: dict[int, int] = {}
    new_wires: list[TypeSymbol] = []
    for w in range(len(wires)):
        r = uf.find(w)
        if r not in remap:
            remap[r] = len(new_wires)
            new_wires.append(wires[r])
    m = [remap[uf.find(w)] for w in range(len(wires))]
    new_edges = tuple(
        Edge(e.label, tuple(m[w] for w in e.ins), tuple(m[w] for w in e.outs)) for e in edges
    )
    return OpenHypergraph(
        tuple(new_wires), new_edges, tuple(m[w] for w in bin_), tuple(m[w] for w in bout)
    )


def _shift(e: Edge, k: int) -> Edge:
    return Edge(e.label, tuple(w + k for w in e.ins), tuple(w + k for w in e.outs))


def og_compose(f: OpenHypergraph, g: OpenHypergraph) -> OpenHypergraph:
    fo, gi = f.cod, g.dom
    for i in range(max(len(fo), len(gi))):
        a = fo[i] if i < len(fo) else None
        b = gi[i] if i < len(gi) else None
        if a != b:
            raise BoundaryTypeMismatch(i, a, b)
    k = len(f.wires)
    wires = f.wires + g.wires
    uf = _UnionFind(len(wires))
    for a, b in zip(f.boundary_out, g.boundary_in):
        uf.union(a, b + k)
    edges = f.edges + tuple(_shift(e, k) for e in g.edges)
    return _quotient(wires, edges, f.boundary_in, tuple(w + k for w in g.boundary_out), uf)


def og_tensor(f: OpenHypergraph, g: OpenHypergraph) -> OpenHypergraph:
    k = len(f.wires)
    return OpenHypergraph(
        f.wires + g.wires,
        f.edges + tuple(_shift(e, k) for e in g.edges),
        f.boundary_in + tuple(w + k for w in g.boundary_in),
        f.boundary_out + tuple(w + k for w in g.boundary_out),
    )


def og_substitute(d: OpenHypergraph, images, type_map=None) -> OpenHypergraph:
    """Replace every edge by the diagram ``images[label.name]`` and retype wires.

    ``type_map`` maps type names to TypeSymbols; unmapped types are kept.
    """
    tmap = type_map or {}
    wires = [tmap.get(t.name, t) for t in d.wires]
    edges: list[Edge] = []
    glue: list[tuple[int, int]] = []
    for e in d.edges:
        img: OpenHypergraph = images[e.label.name]
        exp_dom = tuple(wires[w] for w in e.ins)
        exp_cod = tuple(wires[w] for w in e.outs)
        if img.dom != exp_dom or img.cod != exp_cod:
            raise DiagramError(f"image of {e.label.name} has the wrong boundary")
        k = len(wires)
        wires.extend(img.wires)
        edges.extend(_shift(x, k) for x in img.edges)
        glue.extend((a, b + k) for a, b in zip(e.ins, img.boundary_in))
        glue.extend((a, b + k) for a, b in zip(e.outs, img.boundary_out))
    uf = _UnionFind(len(wires))
    for a, b in glue:
        uf.union(a, b)
    return _quotient(tuple(wires), tuple(edges), d.boundary_in, d.boundary_out, uf)


# ---------------------------------------------------------------- canonical form


@dataclass(frozen=True)
class Canonical:
    diagram: OpenHypergraph
    certificate: str


def _rank(sigs: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [order[s] for s in sigs]


class _Refiner:
    def __init__(self, d: OpenHypergraph):
        self.d = d
        n = len(d.wires)
        self.inc: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for j, e in enumerate(d.edges):
            for p, w in enumerate(e.ins):
                self.inc[w].append((j, 0, p))
            for p, w in enumerate(e.outs):
                self.inc[w].append((j, 1, p))
        self.keys = [e.label.key for e in d.edges]
        bi = [[] for _ in range(n)]
        bo = [[] for _ in range(n)]
        for i, w in enumerate(d.boundary_in):
            bi[w].append(i)
        for i, w in enumerate(d.boundary_out):
            bo[w].append(i)
        self.initial = _rank(
            [(d.wires[w].name, tuple(bi[w]), tuple(bo[w])) for w in range(n)]
        )
        self.isolated = [not self.inc[w] and not bi[w] and not bo[w] for w in range(n)]

    def refine(self, colors: list[int]) -> list[int]:
        d = self.d
        ncol = len(set(colors))
        while True:
            esig = [
                (self.keys[j], tuple(colors[w] for w in e.ins), tuple(colors[w] for w in e.outs))
                for j, e in enumerate(d.edges)
            ]
            wsig = [
                (colors[w], tuple(sorted((esig[j], s, p) for j, s, p in self.inc[w])))
                for w in range(len(colors))
            ]
            colors = _rank(wsig)
            k = len(set(colors))
            if k == ncol:
                return colors
            ncol = k

    def certificate(self, colors: list[int]) -> tuple:
        d = self.d
        edges = sorted(
            (self.keys[j], tuple(colors[w] for w in e.ins), tuple(colors[w] for w in e.outs))
            for j, e in enumerate(d.edges)
        )
        types = [None] * len(colors)
        for w, c in enumerate(colors):
            types[c] = d.wires[w].name
        return (
            tuple(types),
            tuple(colors[w] for w in d.boundary_in),
            tuple(colors[w] for w in d.boundary_out),
            tuple(edges),
        )

    def search(self, colors: list[int]):
        colors = self.refine(colors)
        cells: dict[int, list[int]] = {}
        for w, c in enumerate(colors):
            cells.setdefault(c, []).append(w)
        ties = [ws for ws in cells.values() if len(ws) > 1]
        if not ties:
            return self.certificate(colors), colors
        cell = min(ties, key=lambda ws: (len(ws), colors[ws[0]]))
        # isolated wires of one type are interchangeable: one branch suffices
        branch = cell[:1] if all(self.isolated[w] for w in cell) else cell
        best = None
        for w in branch:
            c2 = [2 * c + 1 for c in colors]
            c2[w] -= 1
            cand = self.search(_rank(c2))
            if best is None or cand[0] < best[0]:
                best = cand
        return best


@lru_cache(maxsize=8192)
def og_canonical(d: OpenHypergraph) -> Canonical:
    r = _Refiner(d)
    cert, colors = r.search(list(r.initial))
    types, bin_, bout, edges = cert
    keyed = {e.label.key: e.label for e in d.edges}
    canon = OpenHypergraph(
        tuple(TypeSymbol(t) for t in types),
        tuple(Edge(keyed[k], ins, outs) for k, ins, outs in edges),
        bin_,
        bout,
    )
    return Canonical(canon, repr(cert))


def og_equal(f: OpenHypergraph, g: OpenHypergraph) -> bool:
    if (len(f.wires), len(f.edges), f.dom, f.cod) != (len(g.wires), len(g.edges), g.dom, g.cod):
        return False
    return og_canonical(f).certificate == og_canonical(g).certificate


# ---------------------------------------------------------------- feedback loops


@dataclass(frozen=True)
class LoopReport:
    carriers_on_cycles: frozenset[TypeSymbol]
    cycle_count_per_carrier: dict
    total_cycles: int = 0

    def count(self, t) -> int:
        name = t.name if isinstance(t, TypeSymbol) else t
        return self.cycle_count_per_carrier.get(TypeSymbol(name), 0)


def og_loop_carriers(d: OpenHypergraph, carriers) -> LoopReport:
    """Elementary feedback cycles through carrier wires.

    Cycles are enumerated in the wire/edge incidence digraph restricted to
    wires whose type is a carrier, so a loop counts once per carrier update
    path rather than once per operational detour through non-carrier wires.
    """
    cs = frozenset(_types(carriers))
    g = nx.DiGraph()
    for j, e in enumerate(d.edges):
        g.add_node(("e", j))
        for w in e.ins:
            if d.wires[w] in cs:
                g.add_edge(("w", w), ("e", j))
        for w in e.outs:
            if d.wires[w] in cs:
                g.add_edge(("e", j), ("w", w))
    counts: dict[TypeSymbol, int] = {}
    total = 0
    for cyc in nx.simple_cycles(g):
        total += 1
        for t in {d.wires[i] for kind, i in cyc if kind == "w"}:
            counts[t] = counts.get(t, 0) + 1
    return LoopReport(frozenset(counts), dict(sorted(counts.items())), total)

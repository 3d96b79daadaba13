"""Hypergraph presentations, syntax patterns and small-diagram generation."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .constraint import Verdict
from .diagram import (
    GeneratorSymbol,
    OpenHypergraph,
    TypeSymbol,
    og_canonical,
    og_compose,
    og_generator,
    og_identity,
    og_permutation,
    og_spider,
    og_tensor,
)

__all__ = [
    "HypergraphPresentation",
    "SyntaxPattern",
    "Membership",
    "presentation_validate",
    "diagram_validate",
    "pattern_membership",
    "pad_pattern",
    "enumerate_small_diagrams",
    "random_diagram",
]


@dataclass(frozen=True)
class HypergraphPresentation:
    types: tuple[TypeSymbol, ...] = ()
    generators: tuple[GeneratorSymbol, ...] = ()
    equations: tuple[tuple[OpenHypergraph, OpenHypergraph], ...] = ()
    display: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "types", tuple(t if isinstance(t, TypeSymbol) else TypeSymbol(t) for t in self.types)
        )
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "equations", tuple(tuple(e) for e in self.equations))

    def type_named(self, name: str) -> TypeSymbol:
        for t in self.types:
            if t.name == name:
                return t
        raise KeyError(name)

    def generator_named(self, name: str) -> GeneratorSymbol:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def has_type(self, name: str) -> bool:
        return any(t.name == name for t in self.types)

    def has_generator(self, name: str) -> bool:
        return any(g.name == name for g in self.generators)

    def show(self, t) -> str:
        name = t.name if isinstance(t, TypeSymbol) else t
        return self.display.get(name, name)

    def families(self) -> list[str]:
        """Distinct generator families, in declaration order."""
        seen: dict[str, None] = {}
        for g in self.generators:
            seen.setdefault(g.family or g.name, None)
        return list(seen)


def diagram_validate(d: OpenHypergraph, p: HypergraphPresentation) -> list[str]:
    """Problems with ``d`` as a diagram over ``p`` (empty list when fine)."""
    problems = []
    types = set(p.types)
    for t in sorted(set(d.wires) - types):
        problems.append(f"undeclared type {t.name}")
    gens = {g.name: g for g in p.generators}
    for e in d.edges:
        g = gens.get(e.label.name)
        if g is None:
            problems.append(f"undeclared generator {e.label.name}")
        elif g != e.label:
            problems.append(f"generator {e.label.name} used with a different profile")
    return problems


def presentation_validate(p: HypergraphPresentation) -> Verdict:
    problems: list[str] = []
    tcount = Counter(t.name for t in p.types)
    problems += [f"duplicate type {n}" for n, c in tcount.items() if c > 1]
    gcount = Counter(g.name for g in p.generators)
    problems += [f"duplicate generator {n}" for n, c in gcount.items() if c > 1]
    declared = set(p.types)
    for g in p.generators:
        for t in g.dom + g.cod:
            if t not in declared:
                problems.append(f"generator {g.name} references undeclared type {t.name}")
    for i, (lhs, rhs) in enumerate(p.equations):
        for side in (lhs, rhs):
            problems += [f"equation {i}: {m}" for m in diagram_validate(side, p)]
        if lhs.dom != rhs.dom or lhs.cod != rhs.cod:
            problems.append(f"equation {i}: sides have different boundary types")
    if problems:
        return Verdict.failed("presentation", problems)
    return Verdict.passed("presentation")


@dataclass(frozen=True)
class SyntaxPattern:
    pattern: OpenHypergraph


class Membership(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member"
    UNKNOWN = "unknown"


def _swap_layers(n: int, depth: int) -> list[tuple[int, ...]]:
    """Permutations reachable with at most ``depth`` layers of disjoint adjacent swaps."""
    layer_perms = []
    for mask in range(1 << max(n - 1, 0)):
        pos = [i for i in range(n - 1) if mask >> i & 1]
        if any(b - a == 1 for a, b in zip(pos, pos[1:])):
            continue
        p = list(range(n))
        for i in pos:
            p[i], p[i + 1] = p[i + 1], p[i]
        layer_perms.append(tuple(p))
    reach = {tuple(range(n))}
    frontier = set(reach)
    for _ in range(depth):
        nxt = set()
        for p in frontier:
            for q in layer_perms:
                r = tuple(p[i] for i in q)
                if r not in reach:
                    nxt.add(r)
        reach |= nxt
        frontier = nxt
    return sorted(reach)


def pad_pattern(g: OpenHypergraph, left: Sequence = (), right: Sequence = ()) -> OpenHypergraph:
    """id[left] * g * id[right]."""
    return og_tensor(og_tensor(og_identity(left), g), og_identity(right))


def _multiset_diff(big: Sequence, small: Sequence):
    c = Counter(big)
    c.subtract(small)
    if any(v < 0 for v in c.values()):
        return None
    return sorted(c.elements())


def pattern_membership(d: OpenHypergraph, g: SyntaxPattern, layers: int = 2) -> Membership:
    pat = g.pattern
    if Counter(e.label.key for e in d.edges) != Counter(e.label.key for e in pat.edges):
        return Membership.NON_MEMBER
    extra_in = _multiset_diff(d.dom, pat.dom)
    extra_out = _multiset_diff(d.cod, pat.cod)
    if extra_in is None or extra_in != extra_out:
        return Membership.UNKNOWN
    target = og_canonical(d).certificate
    orders = sorted(set(itertools.permutations(extra_in)))
    for order in orders:
        for cut in range(len(order) + 1):
            core = pad_pattern(pat, order[:cut], order[cut:])
            ins = _swap_layers(len(core.dom), layers)
            outs = _swap_layers(len(core.cod), layers)
            for pi in ins:
                pre = og_permutation([core.dom[i] for i in pi], _inverse(pi))
                left = og_compose(pre, core)
                for po in outs:
                    cand = og_compose(left, og_permutation(core.cod, po))
                    if og_canonical(cand).certificate == target:
                        return Membership.MEMBER
    return Membership.UNKNOWN


def _inverse(p: Sequence[int]) -> list[int]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return inv


# ---------------------------------------------------------------- generation

_SPIDER_ARITIES = [(m, n) for m in range(3) for n in range(3)]


def _attachments(d: OpenHypergraph, g: GeneratorSymbol) -> Iterator[OpenHypergraph]:
    """d ; (id * g * id) wherever g's domain matches a contiguous slice of d's outputs."""
    cod, k = d.cod, len(g.dom)
    if k == 0:
        return
    for i in range(len(cod) - k + 1):
        if tuple(cod[i : i + k]) == g.dom:
            yield og_compose(d, pad_pattern(og_generator(g), cod[:i], cod[i + k :]))


def enumerate_small_diagrams(p: HypergraphPresentation, max_edges: int) -> Iterator[OpenHypergraph]:
    """Distinct (up to isomorphism) diagrams with at most ``max_edges`` edges.

    Seeds are the empty diagram and all spiders with arities up to 2; each
    extension step tensors on a generator or feeds a contiguous run of
    outputs into one.
    """
    if max_edges > 6:
        raise ValueError("max_edges must be at most 6")
    seen: set[str] = set()

    def fresh(d):
        c = og_canonical(d).certificate
        if c in seen:
            return False
        seen.add(c)
        return True

    frontier = [og_identity([])]
    for t in p.types:
        frontier += [og_spider(t, m, n) for m, n in _SPIDER_ARITIES]
    level = []
    for d in frontier:
        if fresh(d):
            level.append(d)
            yield d
    for _ in range(max_edges):
        nxt = []
        for d in level:
            for g in p.generators:
                for cand in itertools.chain([og_tensor(d, og_generator(g))], _attachments(d, g)):
                    if fresh(cand):
                        nxt.append(cand)
                        yield cand
        level = nxt


def _move_front(d: OpenHypergraph, idxs: Sequence[int]) -> OpenHypergraph:
    cod = d.cod
    rest = [i for i in range(len(cod)) if i not in idxs]
    perm = list(idxs) + rest
    return og_compose(d, og_permutation(cod, perm))


def random_diagram(
    p: HypergraphPresentation,
    rng: np.random.Generator,
    dom: Sequence | None = None,
    max_edges: int = 3,
    ops: int | None = None,
) -> OpenHypergraph:
    """A random diagram over ``p`` with the given domain (random if None).

    Built by a random walk of structural moves (copy, merge, discard, unit,
    permutation) and generator applications on the current outputs.
    """
    types = list(p.types)
    if dom is None:
        dom = [types[i] for i in rng.integers(0, len(types), rng.integers(0, 4))] if types else []
    d = og_identity(dom)
    n_edges = 0
    steps = int(rng.integers(1, 2 * max_edges + 3)) if ops is None else ops
    for _ in range(steps):
        move = rng.choice(["gen", "gen", "copy", "merge", "discard", "unit", "perm"])
        cod = list(d.cod)
        if move == "gen" and p.generators and n_edges < max_edges:
            g = p.generators[int(rng.integers(len(p.generators)))]
            chosen: list[int] = []
            for t in g.dom:
                avail = [i for i, c in enumerate(cod) if c == t and i not in chosen]
                if avail:
                    chosen.append(avail[int(rng.integers(len(avail)))])
                else:
                    d = og_compose(d, og_tensor(og_identity(cod), og_spider(t, 0, 1)))
                    cod.append(t)
                    chosen.append(len(cod) - 1)
            d = _move_front(d, chosen)
            d = og_compose(d, og_tensor(og_generator(g), og_identity(d.cod[len(g.dom) :])))
            n_edges += 1
        elif move == "copy" and cod:
            i = int(rng.integers(len(cod)))
            d = _move_front(d, [i])
            d = og_compose(d, og_tensor(og_spider(cod[i], 1, 2), og_identity(d.cod[1:])))
        elif move == "merge":
            pairs = [(i, j) for i in range(len(cod)) for j in range(len(cod)) if i != j and cod[i] == cod[j]]
            if pairs:
                i, j = pairs[int(rng.integers(len(pairs)))]
                d = _move_front(d, [i, j])
                d = og_compose(d, og_tensor(og_spider(cod[i], 2, 1), og_identity(d.cod[2:])))
        elif move == "discard" and cod:
            i = int(rng.integers(len(cod)))
            d = _move_front(d, [i])
            d = og_compose(d, og_tensor(og_spider(cod[i], 1, 0), og_identity(d.cod[1:])))
        elif move == "unit" and types:
            t = types[int(rng.integers(len(types)))]
            d = og_compose(d, og_tensor(og_identity(cod), og_spider(t, 0, 1)))
        elif move == "perm" and len(cod) > 1:
            d = og_compose(d, og_permutation(cod, list(rng.permutation(len(cod)))))
    return d

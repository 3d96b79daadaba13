"""Semantic backend: finite sets, Euclidean spaces, kernels; agents as
interpretation pairs; interface compatibility, constraint evaluation and
reindexing along architecture morphisms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .archcat import Architecture, ArchMorphism
from .constraint import Constraint, ConstraintKind, Status, Verdict, combine, scope_resolve
from .diagram import OpenHypergraph, TypeSymbol
from .interface import knowledge_compatible_generators, knowledge_projection

__all__ = [
    "FiniteSet",
    "RealSpace",
    "Deterministic",
    "Kernel",
    "Sampler",
    "SemMorphism",
    "Interpretation",
    "Agent",
    "DomainMismatch",
    "MissingBinding",
    "NotEvaluable",
    "UninterpretableSpider",
    "sem_apply",
    "sem_identity",
    "evaluate_diagram",
    "interface_compat_check",
    "constraint_evaluate",
    "register_evaluator",
    "admissibility_check",
    "admissibility_parts",
    "reindex_agent",
]


# ------------------------------------------------------------------ objects


@dataclass(frozen=True)
class FiniteSet:
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("FiniteSet labels must be distinct")

    def contains(self, v) -> bool:
        return v in self.labels

    def sample(self, rng: np.random.Generator):
        return self.labels[int(rng.integers(len(self.labels)))]

    def enumerate(self) -> Iterable:
        return iter(self.labels)

    def index(self, v) -> int:
        return self.labels.index(v)


@dataclass(frozen=True)
class RealSpace:
    shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(d) for d in self.shape))
        if not self.shape or any(d < 1 for d in self.shape):
            raise ValueError("RealSpace dimensions must be at least 1")

    def contains(self, v) -> bool:
        return np.shape(v) == self.shape and bool(np.all(np.isfinite(v)))

    def sample(self, rng: np.random.Generator):
        return rng.normal(size=self.shape)

    def zero(self) -> np.ndarray:
        return np.zeros(self.shape)


SemObject = FiniteSet | RealSpace


class DomainMismatch(ValueError):
    pass


class MissingBinding(KeyError):
    pass


class NotEvaluable(Exception):
    pass


class UninterpretableSpider(ValueError):
    pass


# ------------------------------------------------------------------ morphisms


@dataclass(frozen=True)
class Deterministic:
    fn: Callable[..., tuple]


@dataclass(frozen=True)
class Kernel:
    """Row-stochastic table: input label tuple -> ((prob, output label tuple), ...)."""

    table: dict

    def __post_init__(self):
        for key, row in self.table.items():
            total = sum(p for p, _ in row)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"kernel row {key} sums to {total}")


@dataclass(frozen=True)
class Sampler:
    fn: Callable[..., tuple]  # fn(rng, *inputs)


@dataclass(frozen=True)
class SemMorphism:
    dom: tuple
    cod: tuple
    body: Deterministic | Kernel | Sampler

    def __post_init__(self):
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))
        if isinstance(self.body, Kernel) and not all(
            isinstance(o, FiniteSet) for o in self.dom + self.cod
        ):
            raise ValueError("Kernel bodies need finite domain and codomain")


def sem_identity(objs: Sequence) -> SemMorphism:
    return SemMorphism(tuple(objs), tuple(objs), Deterministic(lambda *xs: tuple(xs)))


def _check(objs, values, what) -> None:
    if len(values) != len(objs):
        raise DomainMismatch(f"{what}: expected {len(objs)} values, got {len(values)}")
    for i, (o, v) in enumerate(zip(objs, values)):
        if not o.contains(v):
            raise DomainMismatch(f"{what}: value at position {i} is not in {o}")


def sem_apply(m: SemMorphism, inputs: Sequence, rng: np.random.Generator | None = None) -> tuple:
    inputs = tuple(inputs)
    _check(m.dom, inputs, "input")
    b = m.body
    if isinstance(b, Deterministic):
        out = tuple(b.fn(*inputs))
    elif isinstance(b, Sampler):
        if rng is None:
            raise ValueError("a Sampler body needs an rng")
        out = tuple(b.fn(rng, *inputs))
    else:
        if rng is None:
            raise ValueError("a Kernel body needs an rng")
        row = b.table[inputs]
        u = rng.random()
        c = 0.0
        out = row[-1][1]
        for p, o in row:
            c += p
            if u < c:
                out = o
                break
        out = tuple(out)
    _check(m.cod, out, "output")
    return out


# ------------------------------------------------------------------ agents


@dataclass
class Interpretation:
    types: dict[str, Any]
    gens: dict[str, SemMorphism]

    def obj(self, t) -> Any:
        return self.types[t.name if isinstance(t, TypeSymbol) else t]


@dataclass
class Agent:
    """Interpretations of both layers, the carrier correspondence R and run-time data.

    ``R`` maps supported (syntax, knowledge) type-name pairs to value maps.
    ``learned`` holds learned syntax-side carrier values by type name.
    ``samplers`` optionally overrides input sampling per syntax or knowledge type.
    """

    arch: Architecture
    I: Interpretation
    J: Interpretation
    R: dict[tuple[str, str], Callable]
    hyperparams: dict[str, float] = field(default_factory=dict)
    env: Any = None
    learned: dict[str, Any] = field(default_factory=dict)
    additive_types: frozenset = frozenset()
    samplers: dict[str, Callable] = field(default_factory=dict)
    enumerators: dict[str, Callable] = field(default_factory=dict)
    kind: str = "custom"

    def knowledge_value(self, syn_type: str, know_type: str, v):
        return self.R[(syn_type, know_type)](v)


def _add(a, b):
    return np.asarray(a) + np.asarray(b)


def evaluate_diagram(
    d: OpenHypergraph,
    interp: Interpretation,
    inputs: Sequence,
    rng: np.random.Generator | None = None,
    additive: frozenset = frozenset(),
) -> tuple:
    """Run an acyclic diagram under an interpretation.

    Wires with several producers are merges and wires with none are units;
    both are read as addition and zero on additive Euclidean types and are
    otherwise uninterpretable. Copy and discard are always available.
    """
    inputs = tuple(inputs)
    if len(inputs) != len(d.boundary_in):
        raise DomainMismatch(f"expected {len(d.boundary_in)} inputs, got {len(inputs)}")
    producers: dict[int, list] = {w: [] for w in range(len(d.wires))}
    for pos, w in enumerate(d.boundary_in):
        producers[w].append(("in", pos))
    for ei, e in enumerate(d.edges):
        for port, w in enumerate(e.outs):
            producers[w].append(("edge", ei, port))

    for w, prods in producers.items():
        t = d.wires[w]
        if len(prods) != 1:
            obj = interp.obj(t)
            if t.name not in additive or not isinstance(obj, RealSpace):
                kind = "unit" if not prods else "merge"
                raise UninterpretableSpider(f"{kind} on type {t.name} has no reading in this backend")

    values: dict[int, Any] = {}
    outputs: dict[int, tuple] = {}
    done: set[int] = set()
    pending = list(range(len(d.edges)))

    def wire_value(w):
        if w in values:
            return values[w]
        prods = producers[w]
        t = d.wires[w]
        if not prods:
            v = interp.obj(t).zero()
        else:
            parts = []
            for p in prods:
                if p[0] == "in":
                    parts.append(inputs[p[1]])
                else:
                    if p[1] not in done:
                        return None
                    parts.append(outputs[p[1]][p[2]])
            v = parts[0]
            for x in parts[1:]:
                v = _add(v, x)
        values[w] = v
        return v

    while pending:
        progressed = False
        for ei in list(pending):
            e = d.edges[ei]
            args = [wire_value(w) for w in e.ins]
            if any(a is None for a in args):
                continue
            m = interp.gens[e.label.name]
            outputs[ei] = sem_apply(m, args, rng)
            done.add(ei)
            pending.remove(ei)
            progressed = True
        if not progressed:
            raise UninterpretableSpider("diagram has a feedback cycle; only acyclic diagrams are evaluated")
    out = []
    for w in d.boundary_out:
        v = wire_value(w)
        out.append(v)
    return tuple(out)


def _is_random(interp: Interpretation, d: OpenHypergraph) -> bool:
    return any(not isinstance(interp.gens[e.label.name].body, Deterministic) for e in d.edges)


def diagram_morphism(d: OpenHypergraph, interp: Interpretation, additive=frozenset()) -> SemMorphism:
    dom = tuple(interp.obj(t) for t in d.dom)
    cod = tuple(interp.obj(t) for t in d.cod)
    if _is_random(interp, d):
        return SemMorphism(dom, cod, Sampler(lambda rng, *xs: evaluate_diagram(d, interp, xs, rng, additive)))
    return SemMorphism(dom, cod, Deterministic(lambda *xs: evaluate_diagram(d, interp, xs, None, additive)))


# ------------------------------------------------------------------ compatibility


def _values_for(agent: Agent, tname: str, obj, rng, samples: int) -> list:
    if tname in agent.enumerators:
        return list(agent.enumerators[tname]())
    if isinstance(obj, FiniteSet):
        return list(obj.enumerate())
    if tname in agent.samplers:
        return [agent.samplers[tname](rng) for _ in range(samples)]
    return [obj.sample(rng) for _ in range(samples)]


def _distance(a, b) -> float:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if a.shape != b.shape:
            return float("inf")
        return float(np.max(np.abs(a - b))) if a.size else 0.0
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(float(a) - float(b))
    return 0.0 if a == b else float("inf")


def _project(agent: Agent, types, values):
    """Knowledge-side values at the supported positions of a syntax profile."""
    proj = knowledge_projection(agent.arch.iface, types)
    by_pos: dict[int, list] = {}
    for i, k in proj:
        by_pos.setdefault(i, []).append(k)
    return by_pos


def interface_compat_check(
    agent: Agent,
    mode: str = "exact",
    samples: int = 8,
    tol: float = 0.0,
    seed: int = 0,
    max_inputs: int = 4096,
) -> Verdict:
    """Check R(I(g)(x)) = J(k_g)(R(x)) for every knowledge-compatible generator.

    Finite input types are enumerated; Euclidean ones are sampled. In
    residual mode the largest gap is reported and the verdict is
    not_evaluable rather than fail.
    """
    if mode not in ("exact", "residual"):
        raise ValueError("mode must be exact or residual")
    rng = np.random.default_rng(seed)
    arch = agent.arch
    part = knowledge_compatible_generators(arch)
    missing = [g for g in part.compatible if g not in arch.iface.bindings]
    if missing:
        raise MissingBinding(", ".join(missing))
    residuals = {}
    evidence = []
    for gname in part.compatible:
        g = arch.syn.generator_named(gname)
        kd = arch.iface.bindings[gname]
        kmorph = diagram_morphism(kd, agent.J, agent.additive_types)
        Ig = agent.I.gens[gname]
        pools = [_values_for(agent, t.name, agent.I.obj(t), rng, samples) for t in g.dom]
        dom_proj = _project(agent, g.dom, None)
        cod_proj = _project(agent, g.cod, None)
        dom_pos = sorted(dom_proj)
        worst = 0.0
        count = 0
        for xs in itertools.islice(itertools.product(*pools), max_inputs):
            sub = np.random.default_rng(rng.integers(2**63))
            ys = sem_apply(Ig, xs, sub)
            kin = []
            for i, k in zip(dom_pos, kd.dom):
                kin.append(agent.R[(g.dom[i].name, k.name)](xs[i]))
            sub2 = np.random.default_rng(rng.integers(2**63))
            kys = sem_apply(kmorph, kin, sub2)
            for i, k, kv in zip(sorted(cod_proj), kd.cod, kys):
                worst = max(worst, _distance(agent.R[(g.cod[i].name, k.name)](ys[i]), kv))
            count += 1
        residuals[gname] = worst
        evidence.append(f"{gname}: {count} inputs, max residual {worst:.3e}")
    top = max(residuals.values(), default=0.0)
    if mode == "residual":
        return Verdict(
            Status.NOT_EVALUABLE if top > tol else Status.PASS,
            residuals,
            evidence + ["residual mode reports the gap without failing"],
            "interface compatibility",
        )
    status = Status.PASS if top <= tol else Status.FAIL
    return Verdict(status, residuals, evidence, "interface compatibility")


# ------------------------------------------------------------------ constraints

_EVALUATORS: dict[ConstraintKind, Callable[[Agent, Constraint], Verdict]] = {}


def register_evaluator(kind: ConstraintKind):
    def deco(fn):
        _EVALUATORS[kind] = fn
        return fn

    return deco


def constraint_evaluate(agent: Agent, rho: Constraint) -> Verdict:
    scope_resolve(agent.arch, rho.scope)
    fn = _EVALUATORS.get(rho.kind)
    if rho.kind is ConstraintKind.UNCHECKED or fn is None:
        prose = rho.param("prose", "")
        return Verdict.skipped(rho.id, [f"not evaluable: {prose}" if prose else "not evaluable"])
    v = fn(agent, rho)
    v.name = rho.id
    return v


@register_evaluator(ConstraintKind.REPRESENTABILITY)
def _representability(agent: Agent, rho: Constraint) -> Verdict:
    carrier = rho.param("carrier")
    want = []
    for t in rho.param("shape_of"):
        obj = agent.I.obj(t)
        if not isinstance(obj, FiniteSet):
            return Verdict.failed(evidence=[f"{t} is not interpreted as a finite set"])
        want.append(len(obj.labels))
    got = agent.J.obj(carrier)
    if isinstance(got, RealSpace) and got.shape == tuple(want):
        return Verdict.passed(evidence=[f"J({carrier}) = R^{tuple(want)}"])
    return Verdict.failed(evidence=[f"J({carrier}) is {got}, expected RealSpace{tuple(want)}"])


@register_evaluator(ConstraintKind.ONTOLOGICAL_FACTORIZATION)
def _ontological(agent: Agent, rho: Constraint) -> Verdict:
    t = rho.param("type")
    factors = rho.param("factors")
    obj = agent.I.obj(t)
    if isinstance(factors, int):
        if isinstance(obj, FiniteSet) and all(isinstance(x, tuple) and len(x) == factors for x in obj.labels):
            return Verdict.passed(evidence=[f"{t} labels are {factors}-tuples"])
        if isinstance(obj, RealSpace) and len(obj.shape) == factors:
            return Verdict.passed(evidence=[f"{t} has {factors} axes"])
        return Verdict.failed(evidence=[f"{t} does not factor into {factors} components"])
    parts = [agent.I.obj(f) for f in factors]
    if isinstance(obj, FiniteSet) and all(isinstance(p, FiniteSet) for p in parts):
        prod = set(itertools.product(*(p.labels for p in parts)))
        if set(obj.labels) == prod:
            return Verdict.passed(evidence=[f"{t} = {' x '.join(factors)}"])
    return Verdict.failed(evidence=[f"{t} is not the product of {', '.join(factors)}"])


def admissibility_check(agent: Agent, tol: float = 0.0, samples: int = 8, seed: int = 0) -> Verdict:
    return combine("admissibility", admissibility_parts(agent, tol, samples, seed))


def admissibility_parts(agent: Agent, tol: float = 0.0, samples: int = 8, seed: int = 0) -> list[Verdict]:
    """Interface compatibility followed by one verdict per declared constraint."""
    parts = []
    try:
        parts.append(interface_compat_check(agent, "exact", samples, tol, seed))
    except MissingBinding as e:
        parts.append(Verdict.failed("interface compatibility", [f"MissingBinding: {e.args[0]}"]))
    for rho in agent.arch.constraints:
        parts.append(constraint_evaluate(agent, rho))
    return parts


# ------------------------------------------------------------------ reindexing


def reindex_agent(F: ArchMorphism, agent_B: Agent) -> Agent:
    """Pull an agent over B back along F : A -> B."""
    if agent_B.arch.name != F.target.name:
        raise ValueError(f"agent is over {agent_B.arch.name}, morphism lands in {F.target.name}")
    A = F.source
    IA_types = {t.name: agent_B.I.obj(F.type_map_syn[t.name]) for t in A.syn.types}
    JA_types = {t.name: agent_B.J.obj(F.type_map_know[t.name]) for t in A.know.types}
    IA = Interpretation(IA_types, {})
    JA = Interpretation(JA_types, {})
    for g in A.syn.generators:
        IA.gens[g.name] = diagram_morphism(F.gen_map_syn[g.name], agent_B.I, agent_B.additive_types)
    for g in A.know.generators:
        JA.gens[g.name] = diagram_morphism(F.gen_map_know[g.name], agent_B.J, agent_B.additive_types)
    R = {}
    for s, k in A.iface.support:
        key = (F.type_map_syn[s.name], F.type_map_know[k.name])
        if key in agent_B.R:
            R[(s.name, k.name)] = agent_B.R[key]
    additive = frozenset(
        [t.name for t in A.syn.types if F.type_map_syn[t.name] in agent_B.additive_types]
        + [t.name for t in A.know.types if F.type_map_know[t.name] in agent_B.additive_types]
    )
    learned = {t.name: agent_B.learned[F.type_map_syn[t.name]] for t in A.syn.types if F.type_map_syn[t.name] in agent_B.learned}
    samplers = {}
    enumerators = {}
    for t in A.syn.types:
        b = F.type_map_syn[t.name]
        if b in agent_B.samplers:
            samplers[t.name] = agent_B.samplers[b]
        if b in agent_B.enumerators:
            enumerators[t.name] = agent_B.enumerators[b]
    for t in A.know.types:
        b = F.type_map_know[t.name]
        if b in agent_B.samplers:
            samplers.setdefault(t.name, agent_B.samplers[b])
        if b in agent_B.enumerators:
            enumerators.setdefault(t.name, agent_B.enumerators[b])
    return replace(
        agent_B,
        arch=A,
        I=IA,
        J=JA,
        R=R,
        learned=learned,
        additive_types=additive,
        samplers=samplers,
        enumerators=enumerators,
        kind=f"{agent_B.kind} reindexed along {F.name}",
    )

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentarch.corpus import builtin
from agentarch.diagram import (
    BoundaryTypeMismatch,
    DiagramError,
    Edge,
    GeneratorSymbol,
    OpenHypergraph,
    TypeSymbol,
    og_canonical,
    og_compose,
    og_equal,
    og_generator,
    og_identity,
    og_loop_carriers,
    og_permutation,
    og_spider,
    og_substitute,
    og_symmetry,
    og_tensor,
)
from agentarch.signature import random_diagram

S, A, E, T = (TypeSymbol(n) for n in ("S", "A", "E", "Theta_s"))
POLICY = GeneratorSymbol("Policy", (S, T), (A,))
ENV = GeneratorSymbol("EnvInteraction", (S, A), (E,))
UPDATE = GeneratorSymbol("Update", (T, E), (T,))
SYN = builtin("RL").syn
seeds = st.integers(0, 2**32 - 1)


def rand(seed, dom=None, max_edges=3):
    return random_diagram(SYN, np.random.default_rng(seed), dom, max_edges)


def shuffled(d, rng):
    """The same diagram with wires and edges renumbered."""
    pw = rng.permutation(len(d.wires))
    inv = {int(old): new for new, old in enumerate(pw)}
    pe = rng.permutation(len(d.edges))
    edges = [d.edges[int(j)] for j in pe]
    return OpenHypergraph(
        tuple(d.wires[int(i)] for i in pw),
        tuple(Edge(e.label, tuple(inv[w] for w in e.ins), tuple(inv[w] for w in e.outs)) for e in edges),
        tuple(inv[w] for w in d.boundary_in),
        tuple(inv[w] for w in d.boundary_out),
    )


def test_generator_boundary():
    d = og_generator(POLICY)
    assert d.dom == (S, T)
    assert d.cod == (A,)
    assert len(d.wires) == 3


def test_compose_glues_matching_wires():
    d = og_generator(POLICY) >> og_spider(A, 1, 0)
    assert d.dom == (S, T) and d.cod == ()
    assert len(d.wires) == 3


def test_compose_type_mismatch():
    with pytest.raises(BoundaryTypeMismatch) as ei:
        og_compose(og_generator(POLICY), og_generator(UPDATE))
    assert isinstance(ei.value, DiagramError)


def test_tensor_concatenates_boundaries():
    d = og_generator(POLICY) @ og_generator(ENV)
    assert d.dom == (S, T, S, A)
    assert d.cod == (A, E)


def test_identity_is_not_a_permutation():
    assert not og_equal(og_identity([S, S]), og_symmetry([S], [S]))


def test_symmetry_swaps_blocks():
    d = og_symmetry([S, A], [E])
    assert d.dom == (S, A, E) and d.cod == (E, S, A)


def test_permutation_matches_symmetry():
    assert og_equal(og_permutation([S, A], [1, 0]), og_symmetry([S], [A]))


def test_merge_then_copy_is_not_identity():
    lhs = og_spider(S, 2, 1) >> og_spider(S, 1, 2)
    assert not og_equal(lhs, og_identity([S, S]))


def test_snake_identity():
    snake = (og_spider(S, 0, 2) @ og_identity([S])) >> (og_identity([S]) @ og_spider(S, 2, 0))
    assert og_equal(snake, og_identity([S]))


def test_equal_requires_same_labels():
    other = GeneratorSymbol("Other", (S, T), (A,))
    assert not og_equal(og_generator(POLICY), og_generator(other))


def test_substitute_replaces_edges():
    images = {"Update": og_identity([T]) @ og_spider(E, 1, 0)}
    d = og_substitute(og_generator(UPDATE), images)
    assert not d.edges
    assert og_equal(d, og_identity([T]) @ og_spider(E, 1, 0))


def test_substitute_respects_type_map():
    T2 = TypeSymbol("Theta_pi_s")
    g2 = GeneratorSymbol("U2", (T2, E), (T2,))
    d = og_substitute(og_generator(UPDATE), {"Update": og_generator(g2)}, {"Theta_s": T2})
    assert d.dom == (T2, E)


def test_rl_pattern_has_one_carrier_loop():
    rl = builtin("RL")
    rep = og_loop_carriers(rl.pattern.pattern, rl.carriers())
    assert rep.total_cycles == 1
    assert rep.count("Theta_s") == 1
    assert rep.count("E") == 0


def test_loops_do_not_count_acyclic_diagrams():
    d = og_generator(POLICY) >> og_spider(A, 1, 0)
    assert og_loop_carriers(d, [S, T, A]).total_cycles == 0


@given(seeds, seeds)
def test_canonical_invariant_under_renumbering(seed, perm_seed):
    d = rand(seed)
    e = shuffled(d, np.random.default_rng(perm_seed))
    assert og_canonical(d).certificate == og_canonical(e).certificate
    assert og_equal(d, e)


@given(seeds)
def test_canonical_is_equal_to_original(seed):
    d = rand(seed)
    assert og_equal(og_canonical(d).diagram, d)


@given(seeds, seeds, seeds)
def test_compose_associative(a, b, c):
    f = rand(a)
    g = rand(b, f.cod)
    h = rand(c, g.cod)
    assert og_equal((f >> g) >> h, f >> (g >> h))


@given(seeds)
def test_identity_units(a):
    f = rand(a)
    assert og_equal(og_identity(f.dom) >> f, f)
    assert og_equal(f >> og_identity(f.cod), f)


@given(seeds, seeds, seeds, seeds)
def test_interchange(a, b, c, d):
    f1, f2 = rand(a), rand(b)
    g1, g2 = rand(c, f1.cod), rand(d, f2.cod)
    assert og_equal((f1 @ f2) >> (g1 @ g2), (f1 >> g1) @ (f2 >> g2))


@given(seeds, seeds)
def test_tensor_associative(a, b):
    f, g = rand(a), rand(b)
    h = og_generator(ENV)
    assert og_equal((f @ g) @ h, f @ (g @ h))


@given(seeds, seeds)
def test_symmetry_natural(a, b):
    f, g = rand(a), rand(b)
    lhs = (f @ g) >> og_symmetry(f.cod, g.cod)
    rhs = og_symmetry(f.dom, g.dom) >> (g @ f)
    assert og_equal(lhs, rhs)


@given(st.lists(st.sampled_from([S, A, E, T]), max_size=3), st.lists(st.sampled_from([S, A, E, T]), max_size=3))
def test_symmetry_involutive(p, q):
    assert og_equal(og_symmetry(p, q) >> og_symmetry(q, p), og_identity(p + q))


@given(st.integers(0, 3), st.integers(1, 3), st.integers(0, 3))
def test_spider_fusion(m, k, n):
    assert og_equal(og_spider(S, m, k) >> og_spider(S, k, n), og_spider(S, m, n))


def test_special_and_frobenius():
    copy, merge = og_spider(S, 1, 2), og_spider(S, 2, 1)
    assert og_equal(copy >> merge, og_identity([S]))
    left = (copy @ og_identity([S])) >> (og_identity([S]) @ merge)
    assert og_equal(left, merge >> copy)


@given(seeds)
def test_substitute_identity_images(a):
    f = rand(a)
    images = {g.name: og_generator(g) for g in SYN.generators}
    assert og_equal(og_substitute(f, images), f)


@given(seeds, seeds)
def test_substitute_is_functorial(a, b):
    f = rand(a)
    g = rand(b, f.cod)
    images = {
        "Update": og_identity([T]) @ og_spider(E, 1, 0),
        "Policy": og_generator(POLICY),
        "EnvInteraction": (og_spider(S, 1, 0) @ og_spider(A, 1, 0)) >> og_spider(E, 0, 1),
    }
    lhs = og_substitute(f >> g, images)
    rhs = og_substitute(f, images) >> og_substitute(g, images)
    assert og_equal(lhs, rhs)


def test_identity_shapes():
    assert og_identity([]).wires == ()
    d = og_identity([S, T])
    assert len(d.wires) == 2 and d.boundary_in == d.boundary_out == (0, 1)


def test_constant_generator():
    g = GeneratorSymbol("Hyp", (), (S,))
    d = og_generator(g)
    assert len(d.wires) == 1 and d.edges[0].ins == ()


def test_small_spiders():
    assert og_equal(og_spider(T, 1, 1), og_identity([T]))
    assert og_spider(T, 2, 0).cod == ()
    assert og_symmetry([], [A]).cod == (A,)
    assert og_equal(og_symmetry([], [A]), og_identity([A]))
    assert og_symmetry([S, E], [A]).cod == (A, S, E)


def test_perception_action_fragment():
    copy_s = og_spider(S, 1, 2) @ og_identity([T])
    swap = og_identity([S]) @ og_symmetry([S], [T])
    d = copy_s >> swap >> (og_generator(POLICY) @ og_identity([S]))
    d = d >> og_symmetry([A], [S]) >> og_generator(ENV)
    assert len(d.edges) == 2
    assert len(d.wires) == 4


def test_tensor_examples():
    f = og_generator(POLICY)
    assert og_equal(f @ og_identity([]), f)
    assert og_equal(og_identity([S]) @ og_identity([A]), og_identity([S, A]))
    d = og_generator(POLICY) @ og_generator(UPDATE)
    assert (len(d.wires), len(d.edges)) == (6, 2)


def test_coassociativity_certificates():
    copy = og_spider(T, 1, 2)
    a = copy >> (og_identity([T]) @ copy)
    b = copy >> (copy @ og_identity([T]))
    assert og_canonical(a).certificate == og_canonical(b).certificate
    assert og_canonical(og_generator(POLICY)).certificate != og_canonical(og_generator(UPDATE)).certificate


def test_copy_is_not_merge():
    assert not og_equal(og_spider(T, 1, 2), og_spider(T, 2, 1))


def test_crl_both_carriers_loop():
    crl = builtin("CRL")
    rep = og_loop_carriers(crl.pattern.pattern, crl.carriers())
    assert {t.name for t in rep.carriers_on_cycles} == {"Theta_pi_s", "Theta_CS_s"}
    assert rep.total_cycles == 2

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from agentarch.corpus import builtin
from agentarch.diagram import (
    GeneratorSymbol,
    TypeSymbol,
    og_canonical,
    og_generator,
    og_identity,
    og_spider,
    og_tensor,
)
from agentarch.signature import (
    _attachments,
    HypergraphPresentation,
    Membership,
    SyntaxPattern,
    diagram_validate,
    enumerate_small_diagrams,
    pattern_membership,
    presentation_validate,
    random_diagram,
)

RL = builtin("RL")
S = TypeSymbol("S")


def test_rl_presentation_valid():
    assert len(RL.syn.types) == 4 and len(RL.syn.generators) == 3
    assert presentation_validate(RL.syn).ok


def test_undeclared_type_named():
    p = HypergraphPresentation([S], [GeneratorSymbol("F", (S,), (TypeSymbol("X"),))])
    v = presentation_validate(p)
    assert not v.ok
    assert any("X" in line for line in v.evidence)


def test_duplicate_type():
    v = presentation_validate(HypergraphPresentation([S, S]))
    assert not v.ok and "duplicate type S" in v.evidence


def test_empty_presentation():
    assert presentation_validate(HypergraphPresentation()).ok


def test_diagram_validate_profile_mismatch():
    fake = GeneratorSymbol("Policy", (S,), (S,))
    probs = diagram_validate(og_generator(fake), RL.syn)
    assert probs == ["generator Policy used with a different profile"]


def test_membership_examples():
    pat = RL.pattern
    assert pattern_membership(pat.pattern, pat) is Membership.MEMBER
    padded = og_tensor(og_identity([S]), pat.pattern)
    assert pattern_membership(padded, pat) is Membership.MEMBER
    policy = og_generator(RL.syn.generator_named("Policy"))
    assert pattern_membership(policy, pat) is Membership.NON_MEMBER


def test_membership_padding_on_right():
    pat = RL.pattern
    padded = og_tensor(pat.pattern, og_identity([S]))
    assert pattern_membership(padded, pat) is Membership.MEMBER


def _certs(it):
    return {og_canonical(d).certificate for d in it}


def test_enumeration_depth_one_contains_generators():
    got = _certs(enumerate_small_diagrams(RL.syn, 1))
    for g in RL.syn.generators:
        assert og_canonical(og_generator(g)).certificate in got
    for t in RL.syn.types:
        assert og_canonical(og_spider(t, 1, 2)).certificate in got
        assert og_canonical(og_identity([t])).certificate in got


def test_enumeration_depth_zero_is_structural():
    ds = list(enumerate_small_diagrams(RL.syn, 0))
    assert ds and all(not d.edges for d in ds)
    # one empty diagram plus 9 arities per type, identity and spider(1,1) coincide
    assert len(ds) == 1 + 4 * 9


def test_enumeration_empty_presentation():
    ds = list(enumerate_small_diagrams(HypergraphPresentation(), 2))
    assert len(ds) == 1 and ds[0].wires == ()


def test_enumeration_oracle_depth_one():
    # independent count: every depth-one diagram here is spider-free plus one
    # generator, so the new entries are exactly the three generators tensored
    # onto each seed, deduplicated by certificate.
    seeds = [og_identity([])] + [og_spider(t, m, n) for t in RL.syn.types for m in range(3) for n in range(3)]
    want = _certs(seeds)
    for d in seeds:
        for g in RL.syn.generators:
            want.add(og_canonical(og_tensor(d, og_generator(g))).certificate)
            want |= _certs(_attachments(d, g))
    assert _certs(enumerate_small_diagrams(RL.syn, 1)) == want


def test_enumeration_unique():
    ds = list(enumerate_small_diagrams(RL.syn, 2))
    assert len(_certs(ds)) == len(ds)
    assert max(len(d.edges) for d in ds) == 2


@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_random_diagrams_are_well_typed(seed, k):
    d = random_diagram(RL.syn, np.random.default_rng(seed), max_edges=k)
    assert diagram_validate(d, RL.syn) == []
    assert len(d.edges) <= k


@given(st.integers(0, 2**32 - 1))
def test_generator_is_member_of_itself(seed):
    rng = np.random.default_rng(seed)
    g = RL.syn.generators[int(rng.integers(3))]
    d = og_generator(g)
    assert pattern_membership(d, SyntaxPattern(d)) is Membership.MEMBER

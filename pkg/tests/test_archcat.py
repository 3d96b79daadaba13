from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentarch.archcat import (
    MiddleMismatch,
    arch_equal,
    arch_validate,
    constraint_transport,
    morphism_apply,
    morphism_compose,
    morphism_identity,
    morphism_validate,
)
from agentarch.constraint import Constraint, ConstraintKind, Ref, RefKind, ScopeRef, scope_resolve
from agentarch.corpus import LADDER, NAMES, builtin, builtin_morphism, ladder
from agentarch.diagram import og_equal, og_generator, og_spider

RL_TO_CRL = builtin_morphism("RL_to_CRL")


@pytest.mark.parametrize("name", NAMES)
def test_builtins_validate(name):
    v = arch_validate(builtin(name))
    assert v.ok, v.evidence


def test_bad_scope_fails(rl):
    bad = Constraint("oops", "Unchecked", ScopeRef.of("Theta_CS"), {"prose": "x"})
    v = arch_validate(replace(rl, constraints=rl.constraints + (bad,)))
    assert not v.ok
    assert any("UnknownRef" in e and "Theta_CS" in e for e in v.evidence)


def test_duplicate_constraint_id(rl):
    v = arch_validate(replace(rl, constraints=rl.constraints + rl.constraints[:1]))
    assert not v.ok


def test_rl_to_crl_validates():
    assert morphism_validate(RL_TO_CRL).ok
    assert RL_TO_CRL.type_map_syn["Theta_s"] == "Theta_pi_s"


@pytest.mark.parametrize("name", ["RL", "CRL", "SBL"])
def test_identity_validates(name):
    assert morphism_validate(morphism_identity(builtin(name))).ok


def test_wrong_codomain_fails(rl, crl):
    gm = dict(RL_TO_CRL.gen_map_syn)
    gm["Policy"] = og_spider(crl.syn.type_named("S"), 1, 1)
    v = morphism_validate(replace(RL_TO_CRL, gen_map_syn=gm))
    assert not v.ok
    assert any("image of Policy has domain" in e for e in v.evidence)
    assert any("image of Policy has codomain S, expected A" in e for e in v.evidence)


def test_unmapped_type_fails():
    tm = dict(RL_TO_CRL.type_map_syn)
    del tm["E"]
    v = morphism_validate(replace(RL_TO_CRL, type_map_syn=tm))
    assert not v.ok and any("type E is not mapped" in e for e in v.evidence)


def test_naturality_fails():
    tm = dict(RL_TO_CRL.type_map_know)
    tm["Theta_k"] = "Theta_CS_k"
    v = morphism_validate(replace(RL_TO_CRL, type_map_know=tm))
    assert any("support (Theta_s,Theta_k)" in e for e in v.evidence)


def test_compose_middle_mismatch():
    with pytest.raises(MiddleMismatch):
        morphism_compose(RL_TO_CRL, RL_TO_CRL)


def test_two_routes_agree():
    f, g, h = (builtin_morphism(n) for n in ("RL_to_STEP1", "STEP1_to_STEP2", "STEP2_to_STEP3"))
    left = morphism_compose(morphism_compose(f, g), h)
    right = morphism_compose(f, morphism_compose(g, h))
    assert left.type_map_syn == right.type_map_syn
    for name in left.gen_map_syn:
        assert og_equal(left.gen_map_syn[name], right.gen_map_syn[name])
    for name in left.gen_map_know:
        assert og_equal(left.gen_map_know[name], right.gen_map_know[name])
    assert morphism_validate(left).ok


def test_composite_acts_as_sequential_application():
    f, g = builtin_morphism("RL_to_STEP1"), builtin_morphism("STEP1_to_STEP2")
    fg = morphism_compose(f, g)
    pat = builtin("RL").pattern.pattern
    assert og_equal(morphism_apply(fg, pat), morphism_apply(g, morphism_apply(f, pat)))


@pytest.mark.parametrize("i", range(len(LADDER) - 1))
def test_identity_is_unit(i):
    F = ladder()[i][1]
    for G in (morphism_compose(morphism_identity(F.source), F), morphism_compose(F, morphism_identity(F.target))):
        assert G.type_map_syn == F.type_map_syn
        assert all(og_equal(G.gen_map_syn[k], F.gen_map_syn[k]) for k in F.gen_map_syn)


def test_transport_bellman_to_crl(rl):
    rho = constraint_transport(RL_TO_CRL, rl.constraint("rho_Bell"))
    assert rho.kind is ConstraintKind.FIXED_POINT
    assert rho.scope.refs == {Ref("Theta_pi_k", RefKind.KNOW_TYPE), Ref("PolicyUpd", RefKind.KNOW_GEN)}
    assert rho.param("carrier") == "Theta_pi_k"
    assert rho.param("gamma") == rl.constraint("rho_Bell").param("gamma")


@pytest.mark.parametrize("cid", ["rho_val", "rho_Bell", "rho_pol", "rho_Markov"])
def test_transport_identity(rl, cid):
    rho = rl.constraint(cid)
    out = constraint_transport(morphism_identity(rl), rho)
    assert out.kind == rho.kind and out.params == rho.params
    assert out.scope.names() == rho.scope.names()


def test_transport_unchecked_prose(rl):
    rho = Constraint("u", "Unchecked", ScopeRef.of("Theta_s", "Update"), {"prose": "Update rewrites Theta_s only"})
    out = constraint_transport(RL_TO_CRL, rho)
    assert out.kind is ConstraintKind.UNCHECKED
    assert out.param("prose") == "PolicyUpdate rewrites Theta_pi_s only"


def test_transported_scope_resolves(rl, crl):
    for c in rl.constraints:
        out = constraint_transport(RL_TO_CRL, c)
        assert scope_resolve(crl, out.scope)


def test_arch_equal_reflexive():
    for n in NAMES:
        assert arch_equal(builtin(n), builtin(n))
    assert not arch_equal(builtin("RL"), builtin("CRL"))


@given(st.sampled_from(range(len(LADDER) - 1)), st.sampled_from(range(len(LADDER) - 1)))
def test_any_ladder_segment_validates(i, j):
    i, j = min(i, j), max(i, j)
    steps = [F for _, F in ladder()][i : j + 1]
    out = steps[0]
    for F in steps[1:]:
        out = morphism_compose(out, F)
    assert out.source.name == LADDER[i] and out.target.name == LADDER[j + 1]
    assert morphism_validate(out).ok


def test_generator_image_profile():
    for _, F in ladder():
        for g in F.source.syn.generators:
            d = morphism_apply(F, og_generator(g))
            assert og_equal(d, F.gen_map_syn[g.name])

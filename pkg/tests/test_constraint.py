import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentarch.constraint import (
    Constraint,
    ConstraintKind,
    Ref,
    RefKind,
    ScopeRef,
    Status,
    UnknownRef,
    Verdict,
    combine,
    constraint_registry_list,
    scope_resolve,
)


def test_bellman_scope(rl):
    refs = scope_resolve(rl, ScopeRef.of("Theta_k", "Upd"))
    assert refs == {Ref("Theta_k", RefKind.KNOW_TYPE), Ref("Upd", RefKind.KNOW_GEN)}


def test_policy_scope(rl):
    refs = scope_resolve(rl, ScopeRef.of("Policy", "Theta_s", "Theta_k"))
    assert {r.kind for r in refs} == {RefKind.SYN_GEN, RefKind.SYN_TYPE, RefKind.KNOW_TYPE}


def test_unknown_scope(rl):
    with pytest.raises(UnknownRef) as e:
        scope_resolve(rl, ScopeRef.of("Theta_CS", "S"))
    assert e.value.names == ["Theta_CS"]


def test_pair_scope(rl):
    assert scope_resolve(rl, ScopeRef.of("Theta_s,Theta_k")) == {Ref("Theta_s,Theta_k", RefKind.PAIR)}
    with pytest.raises(UnknownRef):
        scope_resolve(rl, ScopeRef.of("S,Theta_k"))


def test_typed_ref_checked(rl):
    with pytest.raises(UnknownRef):
        scope_resolve(rl, ScopeRef(frozenset({Ref("S", RefKind.KNOW_TYPE)})))


def test_registry():
    reg = dict(constraint_registry_list())
    assert set(reg["FixedPoint"]) == {"carrier", "gamma", "tol", "max_iter"}
    assert reg["MarkovFactorization"] == ("interaction_generator",)
    assert reg["Unchecked"] == ("prose",)
    assert len(reg) == 6


def test_missing_params_rejected():
    with pytest.raises(ValueError, match="missing params"):
        Constraint("x", ConstraintKind.FIXED_POINT, ScopeRef.of("Theta_k"), {"carrier": "Theta_k"})
    with pytest.raises(ValueError):
        Constraint("x", "Unchecked", ScopeRef.of(), {"prose": "p", "extra": 1})


def test_params_order_insensitive():
    a = Constraint("m", "MarkovFactorization", ScopeRef.of("E"), {"interaction_generator": "Env"})
    b = Constraint("m", "MarkovFactorization", ScopeRef.of("E"), [("interaction_generator", "Env")])
    assert a == b and hash(a) == hash(b)


def test_rl_constraints(rl):
    kinds = {c.id: c.kind for c in rl.constraints}
    assert kinds == {
        "rho_val": ConstraintKind.REPRESENTABILITY,
        "rho_Bell": ConstraintKind.FIXED_POINT,
        "rho_pol": ConstraintKind.POLICY_VALUE_COMPAT,
        "rho_Markov": ConstraintKind.MARKOV_FACTORIZATION,
    }


statuses = st.sampled_from(list(Status))


@given(st.lists(statuses, max_size=6))
def test_combine_is_conjunction(ss):
    v = combine("all", [Verdict(s, name=f"p{i}") for i, s in enumerate(ss)])
    assert (v.status is Status.FAIL) == (Status.FAIL in ss)
    assert v.status in (Status.PASS, Status.FAIL)


def test_combine_prefixes_residuals():
    v = combine("c", [Verdict.passed("a", ["ok"], r=0.5), Verdict.skipped("b", ["why"])])
    assert v.ok
    assert v.residuals == {"a.r": 0.5}
    assert v.evidence == ["[a] ok", "[b] why"]

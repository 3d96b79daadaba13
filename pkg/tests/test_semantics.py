from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentarch.archcat import morphism_identity
from agentarch.constraint import Constraint, ScopeRef, Status
from agentarch.corpus import builtin, builtin_morphism
from agentarch.diagram import og_spider
from agentarch.interface import RelationalInterface
from agentarch.rl_runtime import build_rl_agent, greedy_policy, run_trace
from agentarch.semantics import (
    Agent,
    Deterministic,
    DomainMismatch,
    FiniteSet,
    Interpretation,
    Kernel,
    MissingBinding,
    RealSpace,
    Sampler,
    SemMorphism,
    UninterpretableSpider,
    admissibility_check,
    admissibility_parts,
    constraint_evaluate,
    evaluate_diagram,
    interface_compat_check,
    reindex_agent,
    sem_apply,
    sem_identity,
)

X = FiniteSet(("x0", "x1"))
seeds = st.integers(0, 2**32 - 1)


def test_objects_validate():
    with pytest.raises(ValueError):
        FiniteSet(("a", "a"))
    with pytest.raises(ValueError):
        RealSpace((0,))
    with pytest.raises(ValueError):
        RealSpace(())
    assert RealSpace((2, 2)).contains(np.zeros((2, 2)))
    assert not RealSpace((2,)).contains(np.array([np.inf, 0]))


def test_identity_apply():
    assert sem_apply(sem_identity([X]), ("x1",)) == ("x1",)


def test_degenerate_kernel_row(rng):
    k = SemMorphism((X,), (X,), Kernel({("x0",): ((0.0, ("x0",)), (1.0, ("x1",))), ("x1",): ((1.0, ("x1",)),)}))
    assert all(sem_apply(k, ("x0",), rng) == ("x1",) for _ in range(50))


def test_kernel_rows_must_sum_to_one():
    with pytest.raises(ValueError):
        Kernel({("x0",): ((0.5, ("x0",)),)})
    with pytest.raises(ValueError):
        SemMorphism((RealSpace((1,)),), (X,), Kernel({}))


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        sem_apply(sem_identity([X]), ("nope",))
    with pytest.raises(DomainMismatch):
        sem_apply(sem_identity([X]), ())
    bad = SemMorphism((X,), (X,), Deterministic(lambda x: ("elsewhere",)))
    with pytest.raises(DomainMismatch):
        sem_apply(bad, ("x0",))


def test_greedy_policy_morphism(tabular_agent, grid4):
    Q = tabular_agent.learned["Theta_s"]
    pol = tabular_agent.I.gens["Policy"]
    for i, s in enumerate(grid4.states):
        (a,) = sem_apply(pol, (s, Q))
        assert a == grid4.actions[greedy_policy(Q, i)]


@given(seeds)
def test_kernel_and_deterministic_agree(seed):
    rng = np.random.default_rng(seed)
    f = {"x0": "x1", "x1": str(rng.choice(["x0", "x1"]))}
    det = SemMorphism((X,), (X,), Deterministic(lambda x: (f[x],)))
    ker = SemMorphism((X,), (X,), Kernel({(x,): ((1.0, (y,)),) for x, y in f.items()}))
    for x in X.labels:
        assert sem_apply(det, (x,)) == sem_apply(ker, (x,), np.random.default_rng(seed))


@given(seeds)
def test_sampler_reproducible(seed):
    m = SemMorphism((), (RealSpace((3,)),), Sampler(lambda rng: (rng.normal(size=3),)))
    a = sem_apply(m, (), np.random.default_rng(seed))[0]
    b = sem_apply(m, (), np.random.default_rng(seed))[0]
    assert np.array_equal(a, b)


def test_spider_readings():
    T = builtin("RL").syn.type_named("S")
    interp = Interpretation({"S": X}, {})
    assert evaluate_diagram(og_spider(T, 1, 2), interp, ("x1",)) == ("x1", "x1")
    assert evaluate_diagram(og_spider(T, 1, 0), interp, ("x1",)) == ()
    with pytest.raises(UninterpretableSpider):
        evaluate_diagram(og_spider(T, 2, 1), interp, ("x0", "x1"))
    with pytest.raises(UninterpretableSpider):
        evaluate_diagram(og_spider(T, 0, 1), interp, ())


def test_additive_spiders():
    T = builtin("CRL").syn.type_named("Theta_CS_s")
    interp = Interpretation({"Theta_CS_s": RealSpace((2,))}, {})
    add = frozenset({"Theta_CS_s"})
    (v,) = evaluate_diagram(og_spider(T, 2, 1), interp, (np.ones(2), np.ones(2)), additive=add)
    assert np.array_equal(v, [2.0, 2.0])
    (z,) = evaluate_diagram(og_spider(T, 0, 1), interp, (), additive=add)
    assert np.array_equal(z, [0.0, 0.0])


# ---------------------------------------------------------------- compatibility


def test_tabular_exact_compat(tabular_agent):
    v = interface_compat_check(tabular_agent, "exact")
    assert v.ok and v.residuals == {"Update": 0.0}


def test_neural_residual_mode(neural_agent):
    v = interface_compat_check(neural_agent, "residual", samples=4)
    assert v.status is Status.NOT_EVALUABLE
    assert v.residuals["Update"] > 0
    assert interface_compat_check(neural_agent, "exact", samples=4).status is Status.FAIL


def test_shared_update_passes(tabular_agent):
    upd = tabular_agent.J.gens["Upd"]
    I = Interpretation(dict(tabular_agent.I.types), dict(tabular_agent.I.gens, Update=upd))
    agent = Agent(tabular_agent.arch, I, tabular_agent.J, tabular_agent.R, enumerators=tabular_agent.enumerators)
    assert interface_compat_check(agent).ok


def test_missing_binding(tabular_agent):
    rl = tabular_agent.arch
    bare = replace(rl, iface=RelationalInterface(rl.iface.support, {}, rl.iface.syn_types, rl.iface.know_types))
    agent = replace(tabular_agent, arch=bare)
    with pytest.raises(MissingBinding):
        interface_compat_check(agent)
    v = admissibility_check(agent)
    assert v.status is Status.FAIL and any("MissingBinding" in e for e in v.evidence)


def test_mode_validated(tabular_agent):
    with pytest.raises(ValueError):
        interface_compat_check(tabular_agent, "loose")


# ---------------------------------------------------------------- constraints


@pytest.mark.parametrize("cid", ["rho_val", "rho_Bell", "rho_pol", "rho_Markov"])
def test_tabular_constraints_pass(tabular_agent, cid):
    v = constraint_evaluate(tabular_agent, tabular_agent.arch.constraint(cid))
    assert v.ok, v.evidence
    assert v.name == cid


def test_representability_shape(tabular_agent):
    v = constraint_evaluate(tabular_agent, tabular_agent.arch.constraint("rho_val"))
    assert "(4, 2)" in v.evidence[0]


def test_cheating_env_fails_markov(cheat):
    agent = build_rl_agent(cheat, "tabular", {"steps": 20_000}, train=True)
    v = constraint_evaluate(agent, agent.arch.constraint("rho_Markov"))
    assert v.status is Status.FAIL
    assert any("h1=" in e and "h2=" in e for e in v.evidence)


def test_bellman_discount_bound(grid4):
    agent = build_rl_agent(replace(grid4, gamma=0.995), train=False)
    v = constraint_evaluate(agent, agent.arch.constraint("rho_Bell"))
    assert v.status is Status.FAIL


def test_untrained_agent_not_evaluable(grid4):
    agent = build_rl_agent(grid4, train=False)
    v = constraint_evaluate(agent, agent.arch.constraint("rho_Bell"))
    assert v.status is Status.NOT_EVALUABLE


def test_unchecked_not_evaluable(crl_agent):
    for rho in crl_agent.arch.constraints:
        assert constraint_evaluate(crl_agent, rho).status is Status.NOT_EVALUABLE


def test_custom_unchecked(tabular_agent):
    rho = Constraint("u", "Unchecked", ScopeRef.of("S"), {"prose": "states are observable"})
    v = constraint_evaluate(tabular_agent, rho)
    assert v.status is Status.NOT_EVALUABLE and "states are observable" in v.evidence[0]


# ---------------------------------------------------------------- admissibility


def test_tabular_admissible(tabular_agent):
    v = admissibility_check(tabular_agent)
    assert v.ok, v.evidence
    assert [p.name for p in admissibility_parts(tabular_agent)] == [
        "interface compatibility", "rho_val", "rho_Bell", "rho_pol", "rho_Markov"
    ]


def test_neural_not_admissible(neural_agent):
    v = admissibility_check(neural_agent, samples=4)
    assert v.status is Status.FAIL
    assert v.residuals["interface compatibility.Update"] > 0


def test_crl_demo_admissible(crl_agent):
    v = admissibility_check(crl_agent)
    assert v.ok, v.evidence


# ---------------------------------------------------------------- reindexing


def test_reindex_identity(tabular_agent, rng):
    out = reindex_agent(morphism_identity(tabular_agent.arch), tabular_agent)
    assert out.I.types == tabular_agent.I.types and out.J.types == tabular_agent.J.types
    Q = tabular_agent.learned["Theta_s"]
    e = tabular_agent.enumerators["E"]()[3]
    for s in tabular_agent.I.types["S"].labels:
        assert sem_apply(out.I.gens["Policy"], (s, Q)) == sem_apply(tabular_agent.I.gens["Policy"], (s, Q))
    a = sem_apply(out.I.gens["Update"], (Q, e))[0]
    b = sem_apply(tabular_agent.I.gens["Update"], (Q, e))[0]
    assert np.array_equal(a, b)
    a = sem_apply(out.J.gens["Upd"], (Q, e))[0]
    assert np.array_equal(a, b)


def test_reindex_crl_matches_rl(crl_agent, grid4):
    F = builtin_morphism("RL_to_CRL")
    pulled = reindex_agent(F, crl_agent)
    assert pulled.arch.name == "RL"
    direct = build_rl_agent(grid4, train=False)
    theta0 = np.random.default_rng(1).normal(size=(4, 2))
    a = run_trace(pulled, theta0, 500, seed=11)
    assert a == run_trace(direct, theta0, 500, seed=11)
    assert len(set(a)) == 2


def test_reindexed_verdict_computed(crl_agent):
    pulled = reindex_agent(builtin_morphism("RL_to_CRL"), crl_agent)
    parts = admissibility_parts(pulled)
    assert len(parts) == 5
    assert all(p.status in (Status.PASS, Status.FAIL, Status.NOT_EVALUABLE) for p in parts)


def test_reindex_wrong_target(tabular_agent):
    with pytest.raises(ValueError):
        reindex_agent(builtin_morphism("RL_to_CRL"), tabular_agent)

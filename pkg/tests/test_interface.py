from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentarch.archcat import Architecture
from agentarch.corpus import builtin
from agentarch.diagram import TypeSymbol
from agentarch.interface import (
    RelationalInterface,
    UndeclaredSymbol,
    knowledge_compatible_generators,
    knowledge_projection,
    modularity_report,
    render_support_table,
    support_lookup,
    support_matrix,
)
from agentarch.signature import SyntaxPattern

GOLDEN = Path(__file__).parent / "golden"


def test_rl_lookup(rl):
    phi = rl.iface
    assert support_lookup(phi, ["Theta_s"], "Theta_k")
    assert not support_lookup(phi, ["S"], "Theta_k")
    assert support_lookup(phi, ["S", "Theta_s"], "Theta_k")
    assert not support_lookup(phi, [], "Theta_k")


def test_lookup_undeclared(rl):
    with pytest.raises(UndeclaredSymbol):
        support_lookup(rl.iface, ["Nope"], "Theta_k")
    with pytest.raises(UndeclaredSymbol):
        support_lookup(rl.iface, ["S"], "Nope")


def test_partitions(rl, crl):
    p = knowledge_compatible_generators(rl)
    assert p.compatible == ("Update",)
    assert set(p.agnostic) == {"Policy", "EnvInteraction"}
    assert {"PolicyUpdate", "CausalUpdate", "Do"} <= set(knowledge_compatible_generators(crl).compatible)


def test_empty_support_all_agnostic(rl):
    bare = Architecture(
        "Bare", rl.syn, rl.pattern, rl.know,
        RelationalInterface(syn_types=rl.syn.types, know_types=rl.know.types),
    )
    p = knowledge_compatible_generators(bare)
    assert p.compatible == () and len(p.agnostic) == 3


@pytest.mark.parametrize("name,n", [("RL", 2), ("CRL", 3), ("SBL", 7)])
def test_modularity_counts(name, n):
    assert modularity_report(builtin(name)).knowledge_carrier_types == n


@pytest.mark.parametrize("name", ["RL", "CRL", "SBL", "AIXI"])
def test_support_golden(name):
    want = (GOLDEN / f"{name.lower()}_support.txt").read_text(encoding="utf-8")
    assert render_support_table(builtin(name)) == want


def test_projection_positions(rl):
    upd = rl.syn.generator_named("Update")
    proj = knowledge_projection(rl.iface, upd.dom)
    assert proj == [(0, TypeSymbol("Theta_k")), (1, TypeSymbol("E_k"))]


def test_matrix_shape(rl):
    m = support_matrix(rl)
    assert m["rows"] == ["E_k", "Theta_k"]
    assert len(m["cells"]) == 2 and all(len(r) == 4 for r in m["cells"])


syn_names = st.lists(st.sampled_from(["S", "A", "E", "Theta_s"]), max_size=5)


@given(syn_names, syn_names, st.sampled_from(["Theta_k", "E_k"]))
def test_lookup_is_union_over_tensor(xs, ys, k):
    phi = builtin("RL").iface
    both = support_lookup(phi, xs + ys, k)
    assert both == (support_lookup(phi, xs, k) or support_lookup(phi, ys, k))
    assert support_lookup(phi, ys + xs, k) == both


@given(syn_names)
def test_projection_matches_lookup(xs):
    phi = builtin("RL").iface
    proj = knowledge_projection(phi, xs)
    for k in ("Theta_k", "E_k"):
        assert support_lookup(phi, xs, k) == any(kk.name == k for _, kk in proj)

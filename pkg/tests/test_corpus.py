import json

import pytest

from agentarch.corpus import (
    LADDER,
    NAMES,
    UnknownName,
    analyze,
    builtin,
    builtin_morphism,
    compare,
    ladder,
    ladder_composite,
    load_env,
    render_comparison,
    validate_ladder,
)
from agentarch.archcat import morphism_validate


def counts(name):
    A = builtin(name)
    return len(A.syn.types), len(A.syn.generators), len(A.know.types), len(A.know.generators), len(A.constraints)


def test_rl_counts():
    assert counts("RL") == (4, 3, 2, 1, 4)


def test_sbl_counts():
    A = builtin("SBL")
    names = {g.name for g in A.syn.generators}
    assert len(names) == 8 and "EnvInteraction" in names
    assert len(A.know.families()) == 10


def test_aixi_counts():
    A = builtin("AIXI")
    assert len(A.syn.types) == 5 and len(A.syn.generators) == 4
    assert {t.name for t in A.know.types} == {"M", "K", "Es", "W"}


def test_unknown_name():
    with pytest.raises(UnknownName):
        builtin("DQN")
    with pytest.raises(UnknownName):
        builtin_morphism("RL_to_DQN")
    with pytest.raises(UnknownName):
        load_env("nowhere")


def test_rl_analysis():
    r = analyze("RL")
    assert r.loop_report.total_cycles == 1
    assert {(a.name, b.name) for a, b in builtin("RL").iface.support} == {("Theta_s", "Theta_k"), ("E", "E_k")}
    assert r.partition.compatible == ("Update",)
    assert r.valid


@pytest.mark.parametrize("name,loops", [("RL", 1), ("CRL", 2), ("SBL", 5), ("AIXI", 1)])
def test_loop_counts(name, loops):
    assert analyze(name).loop_report.total_cycles == loops


def test_sbl_rows():
    assert analyze("SBL").supported_rows == 7


def test_aixi_unit_domain_flagged():
    assert any("GenHypSpace" in n for n in analyze("AIXI").notes)


def test_constraint_inventory():
    inv = {c["id"]: c["evaluable"] for c in analyze("RL").constraints}
    assert inv == {"rho_val": True, "rho_Bell": True, "rho_pol": True, "rho_Markov": True}
    assert not any(c["evaluable"] for c in analyze("SBL").constraints)


def test_report_serializes():
    for n in NAMES:
        r = analyze(n)
        json.dumps(r.to_json(), ensure_ascii=False)
        assert r.to_text().startswith(f"architecture {n}")


def test_analysis_deterministic():
    assert analyze("STEP3").to_json() == analyze("STEP3").to_json()


def test_ladder_shape():
    rungs = ladder()
    assert [A.name for A, _ in rungs] == list(LADDER[:-1])
    assert all(F.source is A for A, F in rungs)


def test_ladder_validates():
    for name, v in validate_ladder():
        assert v.ok, (name, v.evidence)


def test_step1_factors_observations():
    F = builtin_morphism("RL_to_STEP1")
    assert F.type_map_syn["S"] == "O_i" and F.type_map_syn["A"] == "D_j"


def test_step4_supplies_memory():
    F = builtin_morphism("STEP3_to_STEP4")
    img = F.gen_map_syn["CogModActivation"]
    assert "Mem_s" not in {t.name for t in img.dom}
    assert any(w.name == "Mem_s" for w in img.wires)
    assert morphism_validate(F).ok


def test_composite():
    C = ladder_composite()
    assert C.source.name == "RL" and C.target.name == "SBL"
    assert morphism_validate(C).ok


def test_compare_rl_crl():
    rows = compare("RL", "CRL")
    assert len(rows) == 8
    fb = next(r for r in rows if r.dimension == "Feedback structure")
    assert (fb.a, fb.b, fb.source) == ("1 carrier loop", "2 carrier loops", "computed")
    assert fb.quoted_a == "Single endomorphic loop"


def test_compare_carrier_row_quoted():
    row = compare("RL", "SBL")[0]
    assert row.source == "quoted"
    assert row.b == "Family of schemas Σ"


def test_compare_self():
    assert all(r.a == r.b for r in compare("RL", "RL"))


def test_compare_unquoted_arch():
    rows = compare("STEP2", "AIXI")
    assert rows[0].a == "n/a"
    assert next(r for r in rows if r.dimension == "Feedback structure").a == "8 carrier loops"


def test_render_comparison():
    text = render_comparison("RL", "CRL", compare("RL", "CRL"))
    lines = text.splitlines()
    assert len(lines) == 9 and lines[0].startswith("Dimension")

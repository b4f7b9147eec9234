import pytest

from simulation.oracles import (
    ORACLES,
    OracleResult,
    check_sre_dual,
    check_tableau_equivalence,
    run_oracle_suite,
)

FAST_ORACLES = ["two_qubit_exactness", "asymptotic_convergence", "block_state",
                "clifford_ergotropy", "perturbative_window"]


@pytest.mark.parametrize("name", FAST_ORACLES)
def test_oracle_passes(name):
    result = ORACLES[name]()
    assert result.passed, result.detail


def test_sre_dual_small():
    result = check_sre_dual(samples=10, sizes=(2, 3, 4))
    assert result.passed, result.detail


def test_tableau_equivalence_small():
    result = check_tableau_equivalence(circuits=3, n_sites=6, depth=8)
    assert result.passed, result.detail


@pytest.mark.slow
def test_sre_dual_oracle():
    # 100 random states for each N in 2..6
    result = ORACLES["sre_dual"]()
    assert result.passed, result.detail


@pytest.mark.slow
def test_tableau_equivalence_oracle():
    # 50 circuits, N=10, depth 20
    result = ORACLES["tableau_equivalence"]()
    assert result.passed, result.detail


def test_tableau_equivalence_flags_magic(monkeypatch):
    import simulation.oracles as oracles

    class Magic:
        value = 0.5

    monkeypatch.setattr(oracles, "sre_fast", lambda state: Magic())
    result = check_tableau_equivalence(circuits=1, n_sites=4, depth=2)
    assert not result.passed
    assert "magic" in result.detail


def test_suite_reports_failures_as_results(monkeypatch):
    def broken():
        raise RuntimeError("boom")

    monkeypatch.setitem(ORACLES, "broken", broken)
    results = run_oracle_suite(["clifford_ergotropy", "broken"])
    assert [r.name for r in results] == ["clifford_ergotropy", "broken"]
    assert results[0].passed
    assert results[1] == OracleResult("broken", False, "raised RuntimeError: boom")

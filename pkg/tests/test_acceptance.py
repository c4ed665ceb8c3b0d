"""The eight numbered acceptance criteria, each run at full size and within its time budget.

Every test prints one ``criterion N [PASS|FAIL] ...`` line; the lines are also
collected into an "acceptance criteria" section of the pytest summary.
"""

import json
from pathlib import Path

import conftest
from sumprod import acceptance

GOLDEN = Path(__file__).parent / "golden" / "ratio_report.csv"


def _record(res):
    line = res.line()
    conftest.CRITERION_LINES.append(line)
    print(line)
    if not res.ok:
        print(json.dumps(res.failures[:3], indent=1, default=str))
    return res


def test_criterion_1_exact_identities():
    res = _record(acceptance.criterion_1(seed=0, rational_sets=500, field_sets=200))
    counts = res.details["verdicts"]
    assert sum(counts["ratio.sandwich"].values()) == 500
    assert sum(counts["fp.sandwich"].values()) == 200
    assert res.ok, f"identity failures: {res.details['verdicts']}; missing elements: {res.details['elements of D/D missing from R[A]R[A]']}"


def test_criterion_2_geometric_progression():
    res = _record(acceptance.criterion_2(n_max=40))
    assert res.details["last"]["|D|"] == 40 * 39 + 1
    assert res.ok


def test_criterion_3_subgroup_formula():
    res = _record(acceptance.criterion_3(p_max=200, samples=1000))
    assert all(w["theta"] <= 1 for w in res.details["worst_theta"].values())
    assert res.ok


def test_criterion_4_oracle_equivalences():
    res = _record(acceptance.criterion_4(instances=50, p_max=61))
    counts = res.details["verdicts"]
    assert sum(counts["szt.incidences"].values()) == 50
    assert sum(counts["fp.triples-oracle"].values()) == 50
    assert res.ok


def test_criterion_5_convex_sets():
    res = _record(acceptance.criterion_5(sizes=(5, 10, 20), samples=200))
    assert sum(res.details["verdicts"]["szt.convex-sample"].values()) == 3
    assert res.ok


def test_criterion_6_plunnecke_ruzsa():
    res = _record(acceptance.criterion_6(instances=200))
    counts = res.details["verdicts"]
    assert sum(counts["sets.plunnecke"].values()) == 200
    assert sum(counts["sets.ruzsa-triangle"].values()) == 200
    assert res.ok


def test_criterion_7_ratio_report_golden():
    res = _record(acceptance.criterion_7(golden=GOLDEN))
    assert res.details["rows"] == 13 + 4
    assert res.details["golden_identical"]
    assert res.ok


def test_criterion_8_subgroup_sweep():
    res = _record(acceptance.criterion_8(p_max=500))
    assert res.details["verdicts"]["extremal.paley13"] == {"pass": 1}
    assert res.ok


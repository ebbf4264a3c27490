import math
from fractions import Fraction

import pytest

from ghostslopes import verify as V
from ghostslopes.dims import GhostParams
from ghostslopes.slopes import PRINTED_CASE3_B
from ghostslopes.verify import (
    CheckReport, SweepConfig, check_atkin_lehner, check_delta_gaps, check_ghost_duality, check_main, check_ns,
    check_pstab, check_theta, check_transfer_lemmas, log_bound_holds, summarize, sweep,
)

P = GhostParams(11, 2, 0)


def test_theta_examples():
    assert check_theta(P, 0, 14, 3).status == "pass"
    assert check_theta(P, 0, 4, 1).status == "pass"
    r = check_theta(P, 0, 4, 0)
    assert r.status == "pass" and r.detail == "vacuous"


def test_atkin_lehner_examples():
    assert check_atkin_lehner(P, 0, 16).status == "pass"
    r = check_atkin_lehner(P, 0, 14)
    assert r.status == "skipped" and r.detail


def test_pstab_examples():
    assert check_pstab(P, 0, 14).status == "pass"
    assert check_pstab(P, 0, 4).status == "pass"
    assert check_pstab(P, 0, 16).status == "skipped"


def test_duality_examples():
    assert check_ghost_duality(P, 0, 14).status == "pass"
    assert check_ghost_duality(P, 0, 44).status == "pass"
    assert check_ghost_duality(P, 0, 4).detail == "vacuous"


def test_gap_examples():
    assert check_delta_gaps(P, 0, 14).status == "pass"
    assert check_delta_gaps(P, 0, 254).status == "pass"
    assert check_delta_gaps(P, 0, 4).detail == "vacuous"


def test_transfer_examples():
    r = check_transfer_lemmas(P, 0, 14)
    assert r.status == "pass" and r.params["case"] == 1
    for name in ("prefix-at-k1", "prefix-at-e+1", "twisted-prefix-k2", "point-on-polygon", "final-segment"):
        assert name in r.detail
    assert check_transfer_lemmas(P, 0, 134).status == "pass"
    assert check_transfer_lemmas(P, 0, 16).status == "skipped"
    assert check_transfer_lemmas(P, 0, 94).params["case"] == 2
    assert check_transfer_lemmas(P, 0, 114).status == "pass"


def test_ns_check_negative_weight():
    assert check_ns(P, 0, -16).status == "pass"
    assert check_ns(P, 3, 64).status == "pass"


def test_log_bound_exact():
    # diff <= 3 (log l / log p)^2, compared with a float evaluation away from the boundary
    for p in (11, 13):
        for l in range(2, 80):
            for diff in (Fraction(1, 2), 1, 2, 3, Fraction(7, 2), 5, 9, 12):
                exact = log_bound_holds(diff, l, p)
                approx = 3 * (math.log(l) / math.log(p)) ** 2
                if abs(float(diff) - approx) > 1e-9:
                    assert exact == (float(diff) <= approx), (diff, l, p)
    assert log_bound_holds(0, 1, 11) is True
    assert log_bound_holds(3, 11, 11) is True  # equality: 3 (log 11/log 11)^2 = 3


def test_main_reports_mismatch_with_witness():
    r = check_main(P, 0, 114, PRINTED_CASE3_B)
    assert r.status == "fail"
    assert r.witness["index"] == 2 and r.params["reading"] == "printed-case3-b"
    again = check_main(P, 0, 114, PRINTED_CASE3_B)
    assert again.to_json() == r.to_json()


def test_report_roundtrip():
    r = check_main(P, 0, 114, PRINTED_CASE3_B)
    back = CheckReport.from_json(r.to_json())
    assert back.to_json() == r.to_json()
    assert back.status == "fail" and not back.ok


def test_empty_sweep():
    assert sweep(SweepConfig(p_list=(11,), k_max=0), ("main",)) == []
    assert sweep(SweepConfig(p_list=()), ("main", "theta")) == []


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        sweep(SweepConfig(), ("nope",))


def test_sweep_order_independent_of_jobs():
    cfg = SweepConfig(p_list=(11,), a_list=(2,), b_list=(0, 1), k_max=80)
    one = [r.to_json() for r in sweep(cfg, ("main", "pstab"), jobs=1)]
    two = [r.to_json() for r in sweep(cfg, ("main", "pstab"), jobs=2)]
    assert one == two and one


def test_crash_becomes_fail(monkeypatch):
    def boom(*args):
        raise RuntimeError("injected")

    monkeypatch.setattr(V, "_run_one", boom)
    out = sweep(SweepConfig(p_list=(11,), a_list=(2,), b_list=(0,), s_list=(0,), k_max=30), ("main",))
    assert out and all(r.status == "fail" and "injected" in r.witness["error"] for r in out)


def test_p13_all_suites_small():
    cfg = SweepConfig(p_list=(13,), a_list=(2,), b_list=(0,), s_list=(0, 5, 11), k_max=120, theta_L=4)
    counts = summarize(sweep(cfg, V.SUITES))
    assert all(c["fail"] == 0 for c in counts.values()), counts


def test_odd_a_mismatches_are_noted_not_failed():
    cfg = SweepConfig(p_list=(11,), a_list=(3,), b_list=(0,), k_max=300)
    reports = sweep(cfg, ("main",))
    assert all(r.status in ("pass", "noted") for r in reports)

"""Acceptance gate.

Runs the shipped default scenario once through the CLI, then checks each
criterion against the report with its literal tolerance.  One PASS/FAIL line
per criterion is printed (and repeated in the pytest terminal summary).
Criterion 11 is report-only and never gates.
"""
import json
from pathlib import Path

import pytest

from symplab.lab.cli import main
from symplab.lab.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]
DEFAULT = ROOT / "scenarios" / "default.json"
RESULTS = []


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "report.json"
    code = main(["run", "--scenario", str(DEFAULT), "--out", str(out)])
    report = json.loads(out.read_text())
    suites = {s["suite"]: s for s in report["suites"]}
    return code, report, suites


def records(suites, suite, check):
    return [r for r in suites[suite]["records"] if r["check"] == check]


def verdict(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def worst(recs):
    return max(r["residual"] for r in recs)


def test_01_factor_two(run):
    _, _, s = run
    fix = records(s, "exact_coincidence", "factor_two_fixture")
    rnd = records(s, "exact_coincidence", "factor_two_exact_directions")
    d = [r["detail"] for r in fix]
    ok_fix = abs(d[0]["omega_D"] - 0.5) <= 1e-10 and abs(d[1]["omega_S"] - 1.0) <= 1e-10
    ok_rnd = len(rnd) >= 50 and all(
        abs(r["detail"]["omega_S"] - 2 * r["detail"]["omega_D"])
        <= 1e-8 * (1 + abs(r["detail"]["omega_D"])) for r in rnd)
    verdict(1, "factor-two coincidence in exact directions", ok_fix and ok_rnd,
            f"fixture {d[0]['omega_D']!r}/{d[1]['omega_S']!r}, {len(rnd)} pairs, worst rel {worst(rnd):.2e}")


def test_02_tangential_degeneracy(run):
    _, _, s = run
    rec = records(s, "tangency", "tangential_integrand_vanishes")
    rnd = [r for r in rec if r["inputs"]]
    ok = len(rnd) >= 50 and worst(rec) <= 1e-10
    verdict(2, "tangential degeneracy of the push-forward pairing", ok,
            f"{len(rnd)} pairs, max integrand {worst(rec):.2e}")


def test_03_horizontality(run):
    _, _, s = run
    ex = records(s, "vanish", "ham_restriction_exact")
    ok_exact = all(r["detail"]["verdict"] == "exact" for r in ex)
    pot = records(s, "vanish", "ham_potential_matches_composition")
    hor = records(s, "vanish", "exact_pairs_tangential_to_zero")
    ok = (ok_exact and len(pot) == len(ex) and worst(pot) <= 1e-8 and worst(hor) <= 1e-8
          and all(r["detail"]["tangential_fields"] >= 20 for r in hor))
    verdict(3, "Hamiltonian restrictions are exact and horizontal", ok,
            f"{len(ex)} samples, potential {worst(pot):.2e}, pairing {worst(hor):.2e}")


def test_04_reduction(run):
    _, _, s = run
    wd = records(s, "reduction", "reduced_pairing_well_defined")
    br = records(s, "reduction", "bracket_integrates_to_zero")
    f2 = records(s, "reduction", "reduced_pairing_factor_two")
    ok = len(wd) >= 50 and worst(wd) <= 1e-8 and worst(br) <= 1e-10 and worst(f2) <= 1e-8
    verdict(4, "reduced pairing well defined", ok,
            f"{len(wd)} tuples, {worst(wd):.2e}, bracket {worst(br):.2e}, factor two {worst(f2):.2e}")


def test_05_splitting(run):
    _, _, s = run
    rec = records(s, "tangency", "split_reconstructs")
    orth = records(s, "tangency", "split_orthogonal")
    idem = records(s, "tangency", "split_idempotent")
    area = records(s, "tangency", "split_closed_field_preserves_area")
    ok = (worst(rec) <= 1e-14 and worst(orth) <= 1e-10 and worst(idem) <= 1e-10
          and worst(area) <= 1e-8 and all(r["pass"] for r in idem))
    verdict(5, "tangential / orthogonal splitting", ok,
            f"reconstruct {worst(rec):.2e}, orthogonal {worst(orth):.2e}, "
            f"idempotent {worst(idem):.2e}, closed {worst(area):.2e}")


def test_06_compatibility(run):
    _, _, s = run
    tame = records(s, "compat", "pairing_tamed_by_j")
    comp = records(s, "compat", "pairing_j_invariant")
    m = min(r["residual"] for r in tame)
    ok = len(tame) >= 100 and m > 0 and len(comp) >= 50 and worst(comp) <= 1e-8
    verdict(6, "J-tilde tames and is compatible", ok,
            f"{len(tame)} samples, min pairing {m:.3e}, invariance {worst(comp):.2e}")


def test_07_closedness(run):
    _, _, s = run
    const = records(s, "closedness", "closedness_constant_model")
    order = records(s, "closedness", "closedness_second_order")
    ratios = [r["residual"] for r in order]
    ok = worst(const) <= 1e-12 and len(ratios) >= 3 and all(3.5 <= q <= 4.5 for q in ratios)
    verdict(7, "finite-difference closedness at second order", ok,
            f"ratios {min(ratios):.3f}..{max(ratios):.3f}, constant model {worst(const):.1e}")


def test_08_moser(run):
    _, _, s = run
    res = records(s, "moser", "moser_residual")[0]
    orc = records(s, "moser", "moser_matches_oracle")[0]
    mis = records(s, "moser", "moser_rejects_area_mismatch")[0]
    d = res["detail"]
    ok = (d["a"] == 0.3 and d["N"] == 64 and d["steps"] == 50 and res["residual"] <= 1e-4
          and orc["residual"] <= 1e-4 and mis["residual"] == 1.0)
    verdict(8, "Moser normalisation of the sheared family", ok,
            f"residual {res['residual']:.2e}, oracle {orc['residual']:.2e}, mismatch rejected")


def test_09_invariance(run):
    _, _, s = run
    sc = load_scenario(DEFAULT)
    symp = records(s, "invariance", "surface_symplectomorphism_invariance")
    pull = records(s, "invariance", "surface_symplectomorphism_keeps_pullback")[0]
    ham = records(s, "invariance", "ambient_hamiltonian_invariance")
    order = records(s, "invariance", "ambient_hamiltonian_invariance_order")
    C, C2 = sc.tolerances["ham_constant"], sc.tolerances["ham_spatial"]
    ok_ham = all(r["residual"] <= C * r["detail"]["steps"] ** -4.0 + C2 * sc.Nx ** -2.0 for r in ham)
    lo, hi = sc.tolerances["ham_order"]
    ok_order = len(order) >= 1 and all(lo <= r["residual"] <= hi for r in order)
    ok = (sc.Nx == 64 and pull["detail"]["steps"] == 200 and worst(symp) <= 1e-6
          and ok_ham and ok_order)
    verdict(9, "invariance under area-preserving and Hamiltonian maps", ok,
            f"sympl {worst(symp):.2e}, ham {', '.join(format(r['residual'], '.2e') for r in ham)}, "
            f"orders {[round(r['residual'], 2) for r in order]}")


def test_10_holomorphic(run):
    _, _, s = run
    cr = records(s, "holomorphic", "holomorphic_cr_residual")
    j1 = records(s, "holomorphic", "j_preserves_tangent_plane")
    j2 = records(s, "holomorphic", "j_preserves_orthogonal_complement")
    comp = records(s, "holomorphic", "holomorphic_symplectic_composition")
    tame = records(s, "holomorphic", "orthogonal_part_tamed")
    m = min(r["residual"] for r in tame)
    ok = (worst(cr) <= 1e-12 and worst(j1) <= 1e-10 and worst(j2) <= 1e-10
          and worst(comp) <= 1e-10 and len(tame) >= 50 and m > 0)
    verdict(10, "holomorphic suite", ok,
            f"cr {worst(cr):.1e}, J tangent {worst(j1):.1e}, J orthogonal {worst(j2):.1e}, "
            f"composition {worst(comp):.1e}, min tamed {m:.3e}")


def test_11_probe_report_only(run):
    code, report, s = run
    probe = s["probe_converse"]
    recs = probe["records"]
    families = {r["detail"]["family"] for r in recs}
    documented = [r for r in recs if r["detail"]["family"] == "-cos(2 pi x) e2 on f0"]
    ok = (documented and not probe["asserted"] and all(not r["asserted"] for r in recs)
          and code == 0 and report["pass"])
    verdict(11, "converse probe is reported, not asserted", bool(ok),
            f"{len(recs)} probes over {len(families)} families, documented counterexample "
            f"flag {documented[0]['detail']['counterexample'] if documented else None}")


def test_cli_run_default_exits_zero(run):
    code, report, _ = run
    assert code == 0 and report["pass"] and len(report["suites"]) >= 8


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))

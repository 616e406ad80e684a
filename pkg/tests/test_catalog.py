import json

import pytest

from soliton_lab import catalog
from soliton_lab.errors import InvalidSpec


@pytest.mark.parametrize("spec", catalog.default_specs(), ids=lambda s: f"{s.family}{s.params or ''}")
def test_default_family_verifies(spec):
    rep = catalog.verify_family(spec)
    assert rep.passed, rep.table()
    assert rep.lam == pytest.approx(rep.expected_lam)


@pytest.mark.parametrize("params", [{"b0": 0.0}, {"b0": -0.25}, {"c": 0.0}, {"a0": 2.0, "b0": 0.5}])
def test_s1_variants(params):
    rep = catalog.verify_family(catalog.FamilySpec("S1", params))
    assert rep.passed, rep.table()


@pytest.mark.parametrize("family,params", [
    ("StarStarBar", {"theta": "t"}),
    ("StarStarBar", {"theta": "sqrt", "lam": 0.5}),
    ("ProductSolitons", {"C1": 0.0}),
    ("Schwarzschild", {"a0": 2.0, "c1": 0.5}),
])
def test_other_variants(family, params):
    rep = catalog.verify_family(catalog.FamilySpec(family, params))
    assert rep.passed, rep.table()


def test_lambda_perturbation_detected():
    rep = catalog.verify_family(catalog.FamilySpec("S1", lam=-1.9))
    assert not rep.passed
    names = {it.name for it in rep.items if not it.passed}
    assert {"full_tensor", "lambda"} <= names


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        catalog.FamilySpec("Nope")
    with pytest.raises(InvalidSpec):
        catalog.FamilySpec("S1", {"zz": 1})
    with pytest.raises(InvalidSpec):
        catalog.build_family(catalog.FamilySpec("F_alpha", {"alpha": 0.5}))
    with pytest.raises(InvalidSpec):
        catalog.FamilySpec.from_json({"params": {}})


def test_spec_json_roundtrip():
    s = catalog.FamilySpec("F_alpha", {"alpha": 0.7}, lam=0.0)
    back = catalog.FamilySpec.from_json(json.loads(json.dumps(s.to_json())))
    assert back.resolved == s.resolved and back.lam == 0.0


def test_report_json_serializable():
    rep = catalog.verify_family(catalog.FamilySpec("Gaussian"))
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["passed"] is True and obj["spec"]["family"] == "Gaussian"


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("SOLITON_LAB_THREADS", "2")
    assert catalog.worker_count(8) == 2
    monkeypatch.setenv("SOLITON_LAB_THREADS", "x")
    with pytest.raises(InvalidSpec):
        catalog.worker_count(8)


def test_parallel_matches_serial(monkeypatch):
    monkeypatch.setenv("SOLITON_LAB_THREADS", "2")
    specs = [catalog.FamilySpec("Gaussian"), catalog.FamilySpec("S2"), catalog.FamilySpec("CP")]
    par = catalog.verify_families(specs, workers=2)
    ser = [catalog.verify_family(s) for s in specs]
    assert [r.to_json() for r in par] == [r.to_json() for r in ser]

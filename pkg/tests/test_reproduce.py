"""
Full-size reproduction targets; run with --runslow
"""
import pytest

from numwall.core.config import Config
from numwall.core.constants import REFERENCE_CLOSURE_LOWER, REFERENCE_CLOSURE_UPPER
from numwall.core.exceptions import ConfigurationError
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.controllers.app_controller import REPRODUCE_TARGETS, AppController
from numwall.controllers.verify import Certificate, ObligationResult

@pytest.fixture
def controller(tmp_path):
    return AppController(Config(str(tmp_path)))

def test_unknown_target(controller):
    with pytest.raises(ConfigurationError):
        controller.reproduce("everything")

def test_small_conjecture_scan(controller, tmp_path):
    out = tmp_path / "conjecture.json"
    passed, report = controller.reproduce("conjecture", str(out), moduli=[5], size=40)
    assert passed
    assert report["label"] == "EMPIRICAL"
    assert set(report["results"]) == {"paper-folding", "pagoda"}
    assert out.exists()

@pytest.mark.slow
def test_paper_folding_deficiency(controller):
    passed, report = controller.reproduce("thm-main")
    assert passed
    assert report["max_deficiency"] == 4
    assert report["exponent"] == -4

@pytest.mark.slow
def test_pagoda_deficiency(controller):
    passed, report = controller.reproduce("pagoda")
    assert report["window_sides"] == [1]
    assert report["discovery"]["status"] == "PASS", report["discovery"].get("attempts")
    obligations = report["discovery"]["certificate"]["obligations"]
    assert obligations["bounded-deficiency"]["data"]["max_side"] == 1
    assert passed

def test_pagoda_discovery_reports_the_first_passing_candidate(controller, monkeypatch):
    seen = []

    def fake_pipeline(source, params, *args, wall=None, **kwargs):
        seen.append((params.tel, params.cid))
        certificate = Certificate(source.name)
        certificate.add(ObligationResult("discovery", params.cid == 2))
        certificate.add(ObligationResult("bounded-deficiency", True, data={"max_side": 1}))
        return certificate

    monkeypatch.setattr("numwall.controllers.app_controller.full_pipeline", fake_pipeline)
    source = SequenceSource.pagoda(Modulus(3))
    report = controller._pagoda_discovery(source, region=(-20, 30, -40, 40), candidates=((4, 4), (4, 2), (6, 2)))
    assert report["status"] == "PASS"
    assert (report["params"]["tel"], report["params"]["cid"]) == (4, 2)
    assert seen == [(4, 4), (4, 2)]

    report = controller._pagoda_discovery(source, region=(-20, 30, -40, 40), candidates=((4, 4),))
    assert report["status"] == "FAIL"
    assert report["attempts"] == [{"tel": 4, "cid": 4, "failed": ["discovery"]}]

@pytest.mark.slow
def test_cf_oracle(controller):
    passed, report = controller.reproduce("cf-oracle")
    assert passed
    assert (report["paper-folding"], report["pagoda"]) == (4, 2)

@pytest.mark.slow
def test_reference_discovery(controller):
    passed, report = controller.reproduce("discovery")
    assert report["checks"]["closure_region"]
    assert report["closure_region"] == {"lower": list(REFERENCE_CLOSURE_LOWER),
                                        "upper": list(REFERENCE_CLOSURE_UPPER)}
    assert passed, report["checks"]

@pytest.mark.slow
def test_reference_certificate(controller):
    passed, report = controller.reproduce("certificate")
    failed = [name for name, o in report["certificate"]["obligations"].items() if not o["passed"]]
    assert passed, failed

def test_every_target_has_a_handler():
    assert len(REPRODUCE_TARGETS) == len(set(REPRODUCE_TARGETS)) == 8

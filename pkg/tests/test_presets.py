import numpy as np
import pytest

from nilfrac.errors import InputError
from nilfrac.plotting import emit_plot
from nilfrac.presets import PRESETS, Expected, Preset, PresetKind, get_preset, preset_orbit
from nilfrac.unitmap import Orbit, Termination
from nilfrac.verify import VerifyReport, run_verify


def test_every_expected_value_is_cited():
    for p in PRESETS.values():
        for e in p.expected.values():
            assert e.citation


def test_uncited_expected_rejected():
    with pytest.raises(InputError):
        Preset("x", PresetKind.DUAL, None, {"dim": Expected(1, "")}, {})


def test_unknown_preset():
    with pytest.raises(InputError):
        get_preset("nope")
    with pytest.raises(InputError):
        run_verify(["cusp-BT", "nope"])


def test_annotations_are_not_estimated():
    rep = run_verify(["BT-H", "DBT-H"])
    assert all(r.passed is None for r in rep.rows)
    assert rep.ok
    assert preset_orbit(get_preset("BT-H")) is None


def test_report_formats():
    rep = run_verify("dual-k2")
    assert rep.ok and len(rep.rows) == 4
    assert rep.to_json()["ok"] is True
    assert "pass" in rep.to_text()
    assert VerifyReport(rep.rows + [rep.rows[0].__class__("p", "q", "1", "2", 0.1, False)]).ok is False


def test_emit_plot(tmp_path):
    po = preset_orbit(get_preset("dual-k1"), max_iter=500)
    path = emit_plot(po.orbit, "svg", tmp_path / "o.svg", po.curve, "t")
    assert path.read_text().count("<svg") == 1
    emit_plot(po.orbit, "csv", tmp_path / "o.csv")
    assert (tmp_path / "o.csv").read_text().startswith("k,x,y")
    empty = Orbit(np.empty((0, 2)), Termination.MAX_ITERATIONS, (0.0, 0.0), "")
    with pytest.raises(InputError):
        emit_plot(empty, "svg", tmp_path / "e.svg")
    with pytest.raises(InputError):
        emit_plot(po.orbit, "png", tmp_path / "e.png")
    with pytest.raises(InputError):
        emit_plot([1, 2], "svg", tmp_path / "e.svg")

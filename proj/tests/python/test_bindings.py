import math
import pathlib

import pytest

xpmodels = pytest.importorskip("xpmodels")

ZEROS = pathlib.Path(__file__).resolve().parents[1] / "data" / "zeta_zeros.txt"


def test_model_basics():
    m = xpmodels.make_model("linear", {"h": 2 * math.pi})
    assert m.kind == "linear"
    assert m.hbar == 1.0
    lo, hi = m.domain
    assert lo == pytest.approx(2 * math.pi) and math.isinf(hi)
    assert m.w(10.0) == pytest.approx(10.0)
    assert "linear" in m.to_json()
    kinds = {e["kind"] for e in xpmodels.catalog()}
    assert {"linear", "berry-keating", "model-III", "constant", "cosh", "power"} <= kinds


def test_errors_map_to_python_exceptions():
    with pytest.raises(xpmodels.UsageError):
        xpmodels.make_model("nosuch", {})
    with pytest.raises(ValueError):
        xpmodels.make_model("linear", {"h": -1.0})
    m = xpmodels.make_model("linear", {"h": 1.0})
    with pytest.raises(xpmodels.ClassicallyForbiddenError):
        xpmodels.count_states(m, 1.0)
    with pytest.raises(OSError):
        xpmodels.load_zeros("/nonexistent/zeros.txt")


def test_counting_and_curvature():
    m = xpmodels.make_model("linear", {"h": 2 * math.pi})
    for E in (20.0, 60.0):
        assert xpmodels.count_states(m, E) == pytest.approx(
            xpmodels.count_closed("linear", E, {"h": 2 * math.pi}), abs=1e-8)
    bk = xpmodels.make_model("berry-keating", {"h": 1.0})
    assert xpmodels.scalar_curvature(bk, 1.0) == pytest.approx(-2.0, abs=1e-10)
    assert xpmodels.period(bk, 10.0) > 0


def test_gauge_map_of_model_three():
    m3 = xpmodels.make_model("model-III", {"lx": 2.0, "lp": math.pi})
    fwd, img = xpmodels.to_symmetric_gauge(m3)
    assert img.domain[0] == pytest.approx(2 * math.pi)
    for x in (0.5, 3.0, 7.0):
        assert img.w(fwd(x)) == pytest.approx(m3.w(x), rel=1e-10)


def test_spectra():
    s = xpmodels.modelI_spectrum(2 * math.pi, 0.0, 60.0)
    pos = [e for e in s.eigenvalues if e.E > 0]
    assert pos[0].index == 0
    assert pos[0].E == pytest.approx(18.6517906420, abs=1e-8)
    m3 = xpmodels.make_model("model-III", {"lx": 2.0, "lp": math.pi})
    sh = xpmodels.shoot_spectrum(m3, 0.0, 40.0)
    a = sorted(e for e in s.energies if 0 < e < 40)
    b = sorted(e for e in sh.energies if 0 < e < 40)
    assert len(a) == len(b)
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-4


def test_zero_mode_and_constant_model():
    m = xpmodels.make_model("linear", {"h": 2 * math.pi})
    assert xpmodels.zero_mode_norm(m, 0.0) is None
    assert xpmodels.zero_mode_norm(m, math.pi) > 0
    b = xpmodels.constant_bound_state(1.0, math.pi / 4)
    assert b["E0"] == pytest.approx(2 * math.sin(math.pi / 4))
    assert b["mean_x"] == pytest.approx(1 / (2 * math.cos(math.pi / 4)))
    assert xpmodels.constant_bound_state(1.0, 2.0) is None
    s = xpmodels.constant_scattering(3.0, 1.0, 0.2)
    norm = abs(s["A"]) ** 2 * math.exp(-s["u"]) + abs(s["B"]) ** 2 * math.exp(s["u"])
    assert norm == pytest.approx(1 / (2 * math.pi), rel=1e-12)


def test_inversion_and_riemann():
    prof = xpmodels.invert_profile("wu-sprung", grid=[5.0, 20.0, 40.0])
    xs = [x for _, x in prof]
    assert xs == sorted(xs)
    assert xpmodels.smooth_zero_count(2 * math.pi * math.e) == pytest.approx(0.875)
    zeros = xpmodels.load_zeros(str(ZEROS))
    assert len(zeros) == 100
    s = xpmodels.modelI_spectrum(2 * math.pi, 0.0, 200.0)
    rep = xpmodels.compare_spectrum(s, zeros)
    assert rep["has_zeros"]
    late = [r["offset"] for r in rep["rows"] if 100 <= r["E"] <= 200]
    assert all(abs(o - 11 / 8) < 0.1 for o in late)

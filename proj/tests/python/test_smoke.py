import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

oscseg = pytest.importorskip("oscseg")

SCHEMA = json.loads((Path(__file__).resolve().parents[2] / "docs" / "report.schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def test_scenario1_round_trip():
    y, truth = oscseg.simulate("1a", seed=3)
    assert y.shape == (1, 900)
    assert truth["partition"]["cps"] == [300, 650]
    report = oscseg.detect(y, threads=1)
    VALIDATOR.validate(report)
    VALIDATOR.validate(truth)
    assert report["schema_version"] == oscseg.SCHEMA_VERSION
    cps = report["partition"]["cps"]
    assert len(cps) == 2
    assert abs(cps[0] - 300) <= 10 and abs(cps[1] - 650) <= 10
    ev = oscseg.evaluate(report, truth)
    VALIDATOR.validate(ev)
    assert ev["coverage"] == pytest.approx(oscseg.coverage([300, 650], cps, 900))
    assert ev["coverage"] > 0.95
    svg = oscseg.plot_svg(report)
    assert svg.startswith("<svg") and svg.count('class="cp"') == 2


def test_panel_and_options():
    y, truth = oscseg.simulate("3", seed=2, d=2, T=600, m=2)
    assert y.shape == (2, 600)
    report = oscseg.detect(y, grid="equal", p=40, auto_ne=3, labels=["a", "b"], threads=2)
    VALIDATOR.validate(report)
    assert report["input"]["labels"] == ["a", "b"]
    assert 1 <= report["chosen_ne"] <= 3
    user = oscseg.detect(y[0], grid=[0.05, 0.1, 0.2], select="threshold", search="full", threads=1)
    assert user["grid"]["frequencies"] == [0.05, 0.1, 0.2]


def test_white_noise_has_no_change_points():
    y, _ = oscseg.simulate("6", seed=1)
    assert oscseg.detect(y, threads=1)["partition"]["cps"] == []


def test_susie_fit_recovers_two_tones():
    t = np.arange(1, 101)
    rng = np.random.default_rng(0)
    y = (2 * np.sin(2 * np.pi * t / 30) + 3 * np.cos(2 * np.pi * t / 30)
         + 4 * np.sin(2 * np.pi * t / 15) + 5 * np.cos(2 * np.pi * t / 15) + rng.normal(size=100))
    grid = oscseg.equal_grid(250)
    fit = oscseg.susie_fit(y, grid, 2)
    assert fit["alpha"].shape == (2, 250)
    assert np.allclose(fit["alpha"].sum(axis=1), 1.0)
    assert np.all(np.diff(fit["elbo"]) >= -1e-8)
    step = grid[1] - grid[0]
    found = sorted(s["frequency"] for s in fit["selected"])
    assert len(found) == 2
    assert abs(found[0] - 1 / 30) <= step and abs(found[1] - 1 / 15) <= step


def test_fourier_helpers():
    y = np.cos(2 * np.pi * 5 * np.arange(1, 65) / 64)
    freqs, powers = oscseg.periodogram(y)
    assert len(freqs) == 32
    assert freqs[np.argmax(powers)] == pytest.approx(5 / 64)
    assert oscseg.periodogram_grid(y, 1).tolist() == [5 / 64]
    assert oscseg.continuity_compatible_frequencies(0.2, 1).tolist() == pytest.approx([0.2, 0.3])


def test_metrics():
    assert oscseg.coverage([50], [50], 100) == 1.0
    assert oscseg.hausdorff([50], [60], 100) == pytest.approx(0.1)
    assert oscseg.bias([20, 40], [], 100) == 2


def test_errors():
    with pytest.raises(ValueError):
        oscseg.detect(np.zeros(100), delta=0.5)
    with pytest.raises(ValueError):
        oscseg.detect(np.zeros(100), grid="fft")
    with pytest.raises(ValueError):
        oscseg.simulate("7")
    with pytest.raises(ValueError):
        oscseg.detect(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        oscseg.evaluate({"kind": "detection"}, {"kind": "detection"})

"""Change point detection for oscillatory time series.

Reports are plain dicts with the same layout as the command-line tool's JSON.
"""

import json
import os

import numpy as np

from . import _oscseg
from ._oscseg import InputError, SCHEMA_VERSION

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "SCHEMA_VERSION",
    "bias",
    "continuity_compatible_frequencies",
    "coverage",
    "detect",
    "equal_grid",
    "evaluate",
    "hausdorff",
    "periodogram",
    "periodogram_grid",
    "plot_svg",
    "simulate",
    "susie_fit",
]


def _panel(y):
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError("series must be 1-D or 2-D (d, T)")
    return [np.ascontiguousarray(row) for row in arr]


def detect(
    y,
    *,
    grid="periodogram",
    p=50,
    ne=2,
    auto_ne=None,
    delta=1.01,
    min_seg=30,
    select="mdl",
    search="optimistic",
    prior_var=1.0,
    pip_threshold=0.5,
    max_iter=100,
    tol=1e-6,
    refit_ne=0,
    seed=0,
    threads=None,
    labels=None,
):
    """Segment a series or a (d, T) panel.

    grid is "periodogram", "equal" or a sequence of frequencies in (0, 1/2).
    auto_ne=K chooses the number of effects in 1..K and ignores ne.
    """
    series = _panel(y)
    cfg = _oscseg.DetectionConfig()
    spec = _oscseg.GridSpec()
    if isinstance(grid, str):
        modes = {"periodogram": _oscseg.GridMode.PERIODOGRAM, "equal": _oscseg.GridMode.EQUAL}
        if grid not in modes:
            raise ValueError(f"grid must be 'periodogram', 'equal' or a list of frequencies, got {grid!r}")
        spec.mode = modes[grid]
        spec.p = int(p)
    else:
        spec.mode = _oscseg.GridMode.VALUES
        spec.values = [float(v) for v in grid]
    cfg.grid = spec
    if auto_ne is not None:
        cfg.auto_ne_max = int(auto_ne)
        cfg.n_effects = 1
    else:
        cfg.n_effects = int(ne)
    cfg.delta = float(delta)
    cfg.min_seg = int(min_seg)
    selections = {"mdl": _oscseg.Selection.MDL, "threshold": _oscseg.Selection.THRESHOLD}
    searches = {"optimistic": _oscseg.SearchMode.OPTIMISTIC, "full": _oscseg.SearchMode.FULL}
    if select not in selections:
        raise ValueError(f"select must be 'mdl' or 'threshold', got {select!r}")
    if search not in searches:
        raise ValueError(f"search must be 'optimistic' or 'full', got {search!r}")
    cfg.selection = selections[select]
    cfg.search = searches[search]
    cfg.prior_var = float(prior_var)
    cfg.pip_threshold = float(pip_threshold)
    cfg.max_iter = int(max_iter)
    cfg.tol = float(tol)
    cfg.refit_effects = int(refit_ne)
    cfg.seed = int(seed)
    cfg.threads = int(threads) if threads else max(1, os.cpu_count() or 1)
    cfg.validate()
    if labels is None:
        labels = [f"y{i + 1}" for i in range(len(series))]
    return json.loads(_oscseg.detect_json(series, list(labels), cfg))


def simulate(scenario, seed=0, *, sigma=None, T=None, m=None, d=3, d1=None):
    """Returns (y, truth): y has shape (d, T); truth is the truth document."""
    series, truth = _oscseg.simulate_json(
        str(scenario),
        seed=int(seed),
        sigma=-1.0 if sigma is None else float(sigma),
        T=0 if T is None else int(T),
        m=-1 if m is None else int(m),
        d=int(d),
        d1=-1 if d1 is None else int(d1),
    )
    return np.vstack(series), json.loads(truth)


def evaluate(report, truth):
    return json.loads(_oscseg.evaluate_json(json.dumps(report), json.dumps(truth)))


def plot_svg(report, *, width=960, panel_height=250):
    return _oscseg.render_svg(json.dumps(report), width, panel_height)


def periodogram(y):
    """Returns (freqs, powers) at the canonical frequencies j/n."""
    freqs, powers = _oscseg.periodogram(np.asarray(y, dtype=float))
    return np.asarray(freqs), np.asarray(powers)


def equal_grid(p):
    return np.asarray(_oscseg.grid_equal(int(p)))


def periodogram_grid(y, p):
    return np.asarray(_oscseg.grid_periodogram(np.asarray(y, dtype=float), int(p)))


def continuity_compatible_frequencies(omega1, t0):
    return np.asarray(_oscseg.continuity_compatible_frequencies(float(omega1), int(t0)))


def susie_fit(y, freqs, n_effects=2, **kwargs):
    """Sum of single effects fit of y on the sine/cosine pairs of freqs."""
    return _oscseg.susie_fit(np.asarray(y, dtype=float), [float(f) for f in freqs], int(n_effects), **kwargs)


def coverage(truth, est, T):
    return _oscseg.coverage(list(truth), list(est), int(T))


def hausdorff(truth, est, T):
    return _oscseg.hausdorff(list(truth), list(est), int(T))


def bias(truth, est, T):
    return _oscseg.bias(list(truth), list(est), int(T))

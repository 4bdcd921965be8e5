"""Poisson (Baker-Cousins) chi-squared and amplitude-only histogram fits."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import DistributionModel
from .histogram import Histogram

__all__ = ["FitError", "FitResult", "amplitude_fit", "baker_cousins_chi2", "fit_histogram",
           "fit_table_csv"]

_EMPTY_PREDICTION = 1e-12


class FitError(RuntimeError):
    pass


def _bc_terms(n, y):
    n = np.asarray(n, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(n > 0, n * np.log(n / y), 0.0)
    return 2.0 * (y - n + log_term)


def baker_cousins_chi2(observed, predicted) -> float:
    """``2 sum[y - n + n ln(n/y)]``; an empty bin contributes ``2 y``.

    ``observed`` is a :class:`Histogram` or an array of counts.
    """
    n = observed.counts if isinstance(observed, Histogram) else np.asarray(observed)
    y = np.asarray(predicted, dtype=float)
    if n.shape != y.shape:
        raise ValueError(f"observed has {n.shape} bins, prediction {y.shape}")
    if np.any(y <= 0):
        raise ValueError("predictions must be strictly positive in the fit range")
    return float(np.sum(_bc_terms(n, y)))


@dataclass
class FitResult:
    amplitude: float
    amplitude_error: float
    chi2: float
    dof: int
    range: tuple[float, float]
    n_bins: int
    label: str = ""
    gain: int = 1
    n: int = 0

    @property
    def chi2_per_dof(self) -> float:
        return self.chi2 / self.dof


def _bin_fractions(model: DistributionModel, edges: np.ndarray) -> np.ndarray:
    cdf = model.cdf(edges)
    return np.diff(cdf)


def fit_histogram(counts, edges, model: DistributionModel, label: str = "") -> FitResult:
    """Fit ``y_i = a * P(bin i) / P(range)`` to ``counts`` over ``edges``.

    Bin probabilities are exact integrals of the pdf (CDF differences), so the
    amplitude is directly the expected number of entries in the range.  The
    error is the half-width of the ``chi2_min + 1`` interval.
    """
    counts = np.asarray(counts, dtype=float)
    edges = np.asarray(edges, dtype=float)
    if counts.size < 10:
        raise ValueError(f"fit range holds {counts.size} bins; need >= 10")
    frac = _bin_fractions(model, edges)
    mass = float(frac.sum())
    if not mass > 0:
        raise FitError("model has no probability in the fit range")
    used = frac > _EMPTY_PREDICTION * mass
    shape = frac[used] / mass
    n = counts[used]
    if n.sum() <= 0:
        raise FitError("no entries in the fit range")

    def chi2(a):
        return float(np.sum(_bc_terms(n, a * shape)))

    # the amplitude minimum has a closed form (sum y = sum n); refine numerically
    guess = float(n.sum())
    res = optimize.minimize_scalar(chi2, bracket=(0.5 * guess, guess, 1.5 * guess))
    if not res.success:
        raise FitError(f"amplitude minimisation failed: {res.message}")
    a_best, c_best = float(res.x), float(res.fun)

    def excess(a):
        return chi2(a) - c_best - 1.0

    step = max(math.sqrt(a_best), 1e-6)
    hi = a_best + step
    while excess(hi) < 0:
        hi += step
        step *= 2
    lo_step = max(math.sqrt(a_best), 1e-6)
    lo = max(a_best - lo_step, a_best * 1e-6)
    while excess(lo) < 0 and lo > a_best * 1e-6:
        lo = max(lo - lo_step, a_best * 1e-6)
    try:
        upper = optimize.brentq(excess, a_best, hi, xtol=1e-10)
        lower = optimize.brentq(excess, lo, a_best, xtol=1e-10)
    except ValueError as exc:
        raise FitError("could not bracket the chi2 + 1 interval") from exc
    dof = int(used.sum()) - 1
    return FitResult(a_best, 0.5 * (upper - lower), c_best, dof,
                     (float(edges[0]), float(edges[-1])), int(used.sum()), label)


def amplitude_fit(observed, model: DistributionModel, fit_range: tuple[float, float],
                  delta: float | None = None, label: str = "") -> FitResult:
    """Amplitude-only fit of ``model`` to data over ``fit_range``.

    ``observed`` is either a raw sample (binned here with width ``delta``) or
    a :class:`Histogram`, whose bins inside the range are used as they are.
    """
    lo, hi = fit_range
    if isinstance(observed, Histogram):
        edges = observed.edges
        keep = (edges[:-1] >= lo - 1e-12) & (edges[1:] <= hi + 1e-12)
        counts = observed.counts[keep]
        sel_edges = np.r_[edges[:-1][keep], edges[1:][keep][-1:]]
    else:
        if delta is None:
            raise ValueError("bin width needed to fit a raw sample")
        x = np.asarray(getattr(observed, "values", observed), dtype=float)
        nb = int(round((hi - lo) / delta))
        sel_edges = lo + delta * np.arange(nb + 1)
        counts, _ = np.histogram(x, bins=sel_edges)
    return fit_histogram(counts, sel_edges, model, label)


def fit_table_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["distribution", "gain", "n", "amplitude", "amplitude_error", "chi2", "dof",
                "chi2_per_dof", "n_bins", "range"])
    for r in results:
        w.writerow([r.label, r.gain, r.n, f"{r.amplitude:.4f}", f"{r.amplitude_error:.4f}",
                    f"{r.chi2:.4f}", r.dof, f"{r.chi2_per_dof:.4f}", r.n_bins,
                    f"{r.range[0]:g}<=x<={r.range[1]:g}"])
    return buf.getvalue()

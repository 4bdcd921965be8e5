"""Shimazaki-Shinomoto histogram cost as a function of M.

The raw cost ``(2 mu - var) / delta**2`` is evaluated while the bin width
tracks ``exp(h) * n**(-1/M)``.  Costs are then normalised so the curve is 1
at ``M = 1`` and 0 at ``M = 2``; beyond ``M = 2`` the shape constant ``A``
controls how fast the cost climbs again.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .histogram import Histogram, _values, bin_width, build, mu_entries_per_bin

__all__ = ["CostScan", "DEFAULT_GRID", "cnr_model", "cost_scan", "fit_A", "raw_cost"]

DEFAULT_GRID = tuple(round(1.0 + 0.1 * i, 1) for i in range(31))


class FitError(ArithmeticError):
    pass


@dataclass
class CostScan:
    m_grid: np.ndarray
    deltas: np.ndarray
    raw_cost: np.ndarray
    normalized_cost: np.ndarray
    n: int
    h_used: float
    fitted_A: float | None = None
    degenerate: bool = False

    def model_curve(self, A: float | None = None) -> np.ndarray:
        A = self.fitted_A if A is None else A
        return cnr_model(self.m_grid, self.n, A)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["M", "delta", "raw_cost", "normalized_cost", "model_CNR_at_fitted_A"])
        model = self.model_curve() if self.fitted_A is not None else [float("nan")] * len(self.m_grid)
        for row in zip(self.m_grid, self.deltas, self.raw_cost, self.normalized_cost, model):
            w.writerow([f"{row[0]:.2f}"] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def raw_cost(hist: Histogram) -> float:
    """``(2 mean - var) / delta**2`` over all bins (population variance).

    A trailing bin only partly spanned by the data has its count scaled up
    by the covered fraction; otherwise its deficit swamps the variance once
    the bins are wide.
    """
    if hist.n_bins < 2:
        raise ValueError(f"cost needs at least 2 bins, got {hist.n_bins}")
    counts = hist.counts.astype(float)
    if hist.partial_last_bin and hist.last_coverage > 0:
        counts[-1] /= hist.last_coverage
    return (2.0 * counts.mean() - counts.var()) / hist.delta**2


def cost_scan(sample, h_nats: float, m_grid=DEFAULT_GRID) -> CostScan:
    """Re-bin ``sample`` at every ``M`` of ``m_grid`` and tabulate the cost."""
    m_grid = np.asarray(m_grid, dtype=float)
    if m_grid.min() < 1 or m_grid.max() > 4:
        raise ValueError("M grid must lie within [1, 4]")
    if m_grid.size > 1 and np.max(np.diff(m_grid)) > 0.1 + 1e-9:
        raise ValueError("M grid step must not exceed 0.1")
    x = _values(sample)
    n = x.size
    deltas = np.array([bin_width(h_nats, n, m) for m in m_grid])
    raw = np.array([raw_cost(build(x, d)) for d in deltas])

    c1 = raw_cost(build(x, bin_width(h_nats, n, 1.0)))
    c2 = raw_cost(build(x, bin_width(h_nats, n, 2.0)))
    degenerate = math.isclose(c1, c2, rel_tol=1e-12, abs_tol=0.0)
    if degenerate:
        warnings.warn("cost at M=1 equals cost at M=2; normalisation is undefined", RuntimeWarning)
        norm = np.full_like(raw, np.nan)
    else:
        norm = (raw - c2) / (c1 - c2)
    return CostScan(m_grid, deltas, raw, norm, n, float(h_nats), None, degenerate)


def cnr_model(m, n: int, A: float):
    """Normalised-cost model ``1/mu_H - n**-0.5 + A (n**(-2/M) - 1/n)``."""
    m = np.asarray(m, dtype=float)
    return 1.0 / mu_entries_per_bin(n, m) - n**-0.5 + A * (n ** (-2.0 / m) - 1.0 / n)


def fit_A(scan: CostScan) -> float:
    """Least-squares ``A`` for the normalised cost; linear, so closed form.

    Stores the result on ``scan.fitted_A`` as well as returning it.
    """
    m = scan.m_grid
    if m.size < 10 or m.min() > 1.0 + 1e-9 or m.max() < 4.0 - 1e-9:
        raise ValueError("fit needs >= 10 grid points spanning [1, 4]")
    y = scan.normalized_cost
    ok = np.isfinite(y)
    n = scan.n
    base = cnr_model(m, n, 0.0)
    reg = n ** (-2.0 / m) - 1.0 / n
    sxx = float(np.sum(reg[ok] ** 2))
    if sxx < 1e-30:
        raise FitError("regressor vanishes on the grid; A is not identifiable")
    A = float(np.sum(reg[ok] * (y[ok] - base[ok])) / sxx)
    scan.fitted_A = A
    return A

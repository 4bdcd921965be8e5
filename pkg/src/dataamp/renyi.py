"""Rényi entropies of histograms and the shape factor ``F`` estimated from data.

For a histogram with bin width ``delta``, ``R_q + ln(delta)`` approaches the
continuous ``r_q`` of the underlying pdf.  The weighted entries per bin,
``N exp(-R_2)``, equals ``N exp(-H) F`` with ``F = exp(r_1 - r_2)``, which
gives two data-side estimators of ``F``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .histogram import EmptyInputError, Histogram, shannon_entropy

__all__ = ["RenyiSpectrum", "discrete_renyi", "estimate_F", "renyi_spectrum",
           "weighted_entries_per_bin"]


def _probs(hist) -> np.ndarray:
    counts = np.asarray(hist.counts if isinstance(hist, Histogram) else hist, dtype=float)
    total = counts.sum()
    if total < 1:
        raise EmptyInputError("histogram has no entries")
    return counts[counts > 0] / total


def discrete_renyi(hist, q: float) -> float:
    """``ln(sum p_i**q) / (1 - q)`` over occupied bins, in nats.

    ``q = 1`` is the Shannon entropy, ``q = inf`` the min-entropy.
    """
    if q < 0:
        raise ValueError(f"Rényi order must be >= 0, got {q}")
    p = _probs(hist)
    ln_k = math.log(p.size)
    if q == 0 or np.all(p == p[0]):
        return ln_k
    if math.isinf(q):
        return -math.log(p.max())
    if q == 1:
        value = shannon_entropy(hist.counts if isinstance(hist, Histogram) else hist)
    else:
        # log-sum-exp keeps large q stable
        lp = q * np.log(p)
        top = lp.max()
        value = float((top + math.log(np.sum(np.exp(lp - top)))) / (1.0 - q))
    # clamp rounding so the ordering in q holds exactly
    return min(ln_k, max(-math.log(p.max()), value))


@dataclass
class RenyiSpectrum:
    orders: tuple[float, ...]
    discrete_values: tuple[float, ...]
    delta: float | None = None

    def continuous_values(self) -> tuple[float, ...]:
        """Shift by ``ln(delta)`` to estimate the differential ``r_q``."""
        if self.delta is None:
            raise ValueError("bin width unknown")
        return tuple(v + math.log(self.delta) for v in self.discrete_values)


def renyi_spectrum(hist, orders=(0.0, 0.5, 1.0, 2.0, 3.0)) -> RenyiSpectrum:
    delta = hist.delta if isinstance(hist, Histogram) else None
    return RenyiSpectrum(tuple(orders), tuple(discrete_renyi(hist, q) for q in orders), delta)


def weighted_entries_per_bin(hist) -> float:
    """``sum p_i n_i = N sum p_i**2``; equals the plain mean only when flat."""
    counts = np.asarray(hist.counts if isinstance(hist, Histogram) else hist, dtype=float)
    total = counts.sum()
    if total < 1:
        raise EmptyInputError("histogram has no entries")
    return float(np.sum(counts**2) / total)


def estimate_F(hist, n: int, m: float) -> tuple[float, float]:
    """Data-side shape factor: ``(n**(1/m) exp(-R_2), exp(H_B - R_2))``.

    Most reliable for histograms binned with ``2 <= m <= 3``.
    """
    r2 = discrete_renyi(hist, 2.0)
    h_b = discrete_renyi(hist, 1.0)
    return n ** (1.0 / m) * math.exp(-r2), math.exp(h_b - r2)

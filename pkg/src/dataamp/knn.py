"""Nearest-neighbour entropy and Kullback-Leibler divergence for 1-D data.

Neighbour distances come from a sort and a scan of the ``k`` candidates on
either side, which is exact in one dimension.  Exact duplicates are split by
a deterministic jitter of ``1e-12 * range`` before the search; a zero
distance that survives this raises :class:`EstimationError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, polygamma

from .histogram import _values

__all__ = [
    "EstimationError",
    "KldEstimate",
    "averaged_kld",
    "kld_variance",
    "knn_entropy",
    "knn_kld",
    "knn_log_density_variance",
    "trigamma",
]

JITTER = 1e-12
# Var(ln p) of a normal density
NORMAL_LOGP_VAR = 0.5


class EstimationError(ArithmeticError):
    """A neighbour distance is zero, so the log-distance is undefined."""


def trigamma(k) -> float:
    return float(polygamma(1, k))


def _split_duplicates(xs: np.ndarray, scale: float) -> np.ndarray:
    """Spread runs of identical values symmetrically by ``JITTER * scale``.

    ``xs`` must be sorted; the result is sorted too.
    """
    if xs.size < 2:
        return xs
    same = np.diff(xs) == 0
    if not same.any():
        return xs
    eps = JITTER * (scale if scale > 0 else 1.0)
    starts = np.flatnonzero(np.r_[True, ~same])
    lengths = np.diff(np.r_[starts, xs.size])
    # position within run, centred on zero
    run_id = np.repeat(np.arange(starts.size), lengths)
    pos = np.arange(xs.size) - starts[run_id]
    offset = (pos - (lengths[run_id] - 1) / 2.0) * eps
    return xs + offset


def _prepare(x) -> np.ndarray:
    xs = np.sort(_values(x))
    span = float(xs[-1] - xs[0]) if xs.size else 0.0
    return _split_duplicates(xs, span)


def _kth_within(xs: np.ndarray, k: int) -> np.ndarray:
    """Distance from each point of sorted ``xs`` to its k-th neighbour (self excluded)."""
    n = xs.size
    if k == 1:
        gaps = np.diff(xs)
        left = np.r_[np.inf, gaps]
        right = np.r_[gaps, np.inf]
        return np.minimum(left, right)
    pad = np.concatenate([np.full(k, -np.inf), xs, np.full(k, np.inf)])
    idx = np.arange(n) + k
    cand = np.empty((n, 2 * k))
    for j in range(1, k + 1):
        cand[:, j - 1] = xs - pad[idx - j]
        cand[:, k + j - 1] = pad[idx + j] - xs
    return np.partition(cand, k - 1, axis=1)[:, k - 1]


def _kth_cross(xs: np.ndarray, ys: np.ndarray, k: int) -> np.ndarray:
    """Distance from each point of ``xs`` to its k-th neighbour in sorted ``ys``."""
    pos = np.searchsorted(ys, xs)
    pad = np.concatenate([np.full(k, -np.inf), ys, np.full(k, np.inf)])
    if k == 1:
        left = xs - pad[pos]
        right = pad[pos + 1] - xs
        return np.minimum(left, right)
    cand = np.empty((xs.size, 2 * k))
    for j in range(1, k + 1):
        cand[:, j - 1] = xs - pad[pos + k - j]
        cand[:, k + j - 1] = pad[pos + k + j - 1] - xs
    return np.partition(cand, k - 1, axis=1)[:, k - 1]


def knn_entropy(sample, k: int = 1) -> float:
    """Kozachenko-Leonenko differential entropy estimate in nats.

    ``psi(n) - psi(k) + mean(ln(2 rho_k))`` where ``rho_k`` is the distance to
    the k-th nearest neighbour within the sample.
    """
    raw = _values(sample)
    if k < 1 or raw.size <= k:
        raise ValueError(f"need n > k >= 1, got n={raw.size}, k={k}")
    if raw.min() == raw.max():
        raise EstimationError("all values identical")
    xs = _prepare(raw)
    n = xs.size
    rho = _kth_within(xs, k)
    if np.any(rho <= 0):
        raise EstimationError("zero neighbour distance after duplicate splitting")
    return float(digamma(n) - digamma(k) + np.mean(np.log(2.0 * rho)))


def knn_log_density_variance(sample, k: int = 4) -> float:
    """Plug-in ``Var(ln p)`` from kNN density estimates at the sample points.

    ``ln p_hat = psi(k) - psi(n) - ln(2 rho_k)`` carries extra variance
    ``psi_1(k)`` from the neighbour-distance noise, which is subtracted.
    """
    xs = _prepare(sample)
    n = xs.size
    if k < 1 or n <= k:
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    rho = _kth_within(xs, k)
    if np.any(rho <= 0):
        raise EstimationError("zero neighbour distance after duplicate splitting")
    return max(0.0, float(np.var(np.log(rho))) - trigamma(k))


def knn_kld(p, q, k: int = 1) -> float:
    """kNN estimate of ``D(P || Q)`` in nats from samples of each.

    ``mean(ln(nu_k / rho_k)) + ln(m / (n - 1))`` with ``rho_k`` the k-th
    neighbour distance inside ``p`` and ``nu_k`` the k-th neighbour distance
    from each ``p`` point into ``q``.  Small negative values are expected
    noise and are not clamped.
    """
    xs = _prepare(p)
    ys = _prepare(q)
    n, m = xs.size, ys.size
    if k < 1 or n <= k or m < k:
        raise ValueError(f"need |p| > k and |q| >= k, got {n}, {m}, k={k}")
    rho = _kth_within(xs, k)
    nu = _kth_cross(xs, ys, k)
    if np.any(rho <= 0) or np.any(nu <= 0):
        raise EstimationError("zero neighbour distance; samples share identical values")
    return float(np.mean(np.log(nu / rho)) + math.log(m / (n - 1)))


def kld_variance(n: int, n_iter: int = 1, rho: float = 0.0, *, k: int = 1,
                 var_log_p: float = NORMAL_LOGP_VAR, n_resolution: int | None = None) -> float:
    """Predicted variance (nats^2) of an iterated kNN KLD estimate.

    ``3 (Var(ln p) + psi_1(k)) / (n n_iter) + (1 + rho^2) / (2 n_res)``.  The
    second term is the floor set by how finely the pdf was resolved; it uses
    ``n_resolution`` (the training-sample size of amplified data) when given,
    else ``n``.  With a normal density and ``k = 1`` this is
    ``(6.44 / n_iter + 1/2) / n``.
    """
    if n < 2 or n_iter < 1 or abs(rho) > 1:
        raise ValueError(f"invalid arguments n={n}, n_iter={n_iter}, rho={rho}")
    n_res = n if n_resolution is None else n_resolution
    v_h = var_log_p + trigamma(k)
    return 3.0 * v_h / (n * n_iter) + (1.0 + rho**2) / (2.0 * n_res)


DIRECTIONS = ("p||q", "q||p", "symmetric")


@dataclass
class KldEstimate:
    value_nats: float
    k: int
    n: int
    n_iterations: int
    predicted_sd_nats: float
    direction: str = "p||q"
    values: tuple[float, ...] = ()
    n_failed: int = 0
    var_log_p_source: str = "model"

    @property
    def value_bits(self) -> float:
        return self.value_nats / math.log(2)

    @property
    def predicted_sd_bits(self) -> float:
        return self.predicted_sd_nats / math.log(2)


def _directed(p, q, k, direction):
    if direction == "p||q":
        return knn_kld(p, q, k)
    if direction == "q||p":
        return knn_kld(q, p, k)
    if direction == "symmetric":
        return 0.5 * (knn_kld(p, q, k) + knn_kld(q, p, k))
    raise ValueError(f"direction must be one of {DIRECTIONS}")


def averaged_kld(p_gen, q_gen, k: int = 1, n_iter: int = 16, seed=0, *,
                 direction: str = "p||q", n_resolution: int | None = None,
                 var_log_p: float = NORMAL_LOGP_VAR,
                 var_log_p_source: str = "model") -> KldEstimate:
    """Mean kNN KLD over ``n_iter`` independently regenerated sample pairs.

    ``p_gen`` and ``q_gen`` are callables taking a ``numpy.random.Generator``
    and returning a 1-D sample.  Iteration ``i`` uses the ``i``-th child of
    ``SeedSequence(seed)`` so any subset of iterations can be rerun alone.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    values = []
    failed = 0
    n = 0
    for child in ss.spawn(n_iter):
        rng = np.random.default_rng(child)
        p = _values(p_gen(rng))
        q = _values(q_gen(rng))
        n = max(n, p.size)
        try:
            values.append(_directed(p, q, k, direction))
        except EstimationError:
            failed += 1
    if failed > 0.2 * n_iter or not values:
        raise EstimationError(f"{failed} of {n_iter} iterations failed")
    sd = math.sqrt(kld_variance(n, len(values), 0.0, k=k, var_log_p=var_log_p,
                                n_resolution=n_resolution))
    return KldEstimate(float(np.mean(values)), k, n, len(values), sd, direction,
                       tuple(values), failed, var_log_p_source)

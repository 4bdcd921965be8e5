"""Data amplification: the GenCopy generator and the M_eff bound.

GenCopy bins a training sample at ``M = 2`` and emits ``gain`` randomised
copies, each point moved uniformly within its own bin.  Any amplifier, GenCopy
or otherwise, is characterised by ``M_eff = 2 ln(generated) / ln(training)``,
which should not exceed 3.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .histogram import Histogram, Sample, _values, bin_index, bin_width, build

__all__ = [
    "AmplificationReport",
    "BOUND",
    "audit",
    "chain_bound",
    "chain_m_eff",
    "gain_for_meff",
    "gencopy",
    "m_eff",
    "max_gain",
    "meff_grid",
    "reference_histogram",
]

BOUND = 3.0
VERDICT_TOL = 0.005
SMALL_TRAINING = 1000


def m_eff(n_train: int, n_gen: int) -> float:
    """``2 ln(n_gen) / ln(n_train)``; the log base cancels."""
    if n_train < 2:
        raise ValueError(f"need at least 2 training events, got {n_train}")
    if n_gen < n_train:
        raise ValueError(f"generated ({n_gen}) fewer than training ({n_train}) events")
    return 2.0 * math.log(n_gen) / math.log(n_train)


def max_gain(n_train: int, m_cap: float = BOUND, m0: float = 2.0) -> int:
    """Largest gain ``round(n**(m_cap/m0 - 1))`` allowed at ``M = m_cap``."""
    if not m_cap >= m0 >= 2:
        raise ValueError(f"need m_cap >= m0 >= 2, got m_cap={m_cap}, m0={m0}")
    return int(round(n_train ** (m_cap / m0 - 1.0)))


def gain_for_meff(n_train: int, meff: float) -> int:
    return max(1, int(round(n_train ** (meff / 2.0 - 1.0))))


def meff_grid(n_train: int, meff_max: float = 4.0, step: float = 0.1) -> list[tuple[int, float]]:
    """(gain, realised M_eff) pairs for a KLD scan.

    Every integer gain up to the bound, then targets 3.1, 3.2, ... in
    ``step`` increments up to ``meff_max``.
    """
    grid = []
    g = 1
    while True:
        me = m_eff(n_train, g * n_train)
        if me > BOUND + VERDICT_TOL or me > meff_max + 1e-9:
            break
        grid.append((g, me))
        g += 1
    target = BOUND + step
    while target <= meff_max + 1e-9:
        g = gain_for_meff(n_train, target)
        if g > grid[-1][0]:
            grid.append((g, m_eff(n_train, g * n_train)))
        target = round(target + step, 10)
    return grid


def chain_m_eff(m_pre: float, m_after: float) -> float:
    """M_eff of amplifying data that was itself amplified to ``m_pre``."""
    if not 2 <= m_pre <= m_after:
        raise ValueError(f"need 2 <= m_pre <= m_after, got {m_pre}, {m_after}")
    return 2.0 * m_after / m_pre


def chain_bound(m_pre: float) -> float:
    """Largest admissible M_eff for pre-amplified data: ``6 / m_pre``."""
    if m_pre < 2:
        raise ValueError(f"m_pre must be >= 2, got {m_pre}")
    return 2.0 * BOUND / m_pre


def reference_histogram(training, h_nats: float, m0: float = 2.0) -> Histogram:
    x = _values(training)
    return build(x, bin_width(h_nats, x.size, m0))


def gencopy(training, gain: int, h_nats: float | None = None, seed=0, m0: float = 2.0) -> Sample:
    """Amplify ``training`` by an integer ``gain``.

    Each copy replaces a point in bin ``i`` by ``x_start + (i + u) * delta``
    with ``u`` uniform on [0, 1); copy ``c`` draws from the ``c``-th child of
    ``SeedSequence(seed)``.  ``h_nats`` defaults to a kNN (k=4) estimate from
    the training data.
    """
    if isinstance(gain, float) and not gain.is_integer():
        raise ValueError(f"gain must be an integer, got {gain}")
    gain = int(gain)
    if gain < 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    x = _values(training)
    if x.size < 2:
        raise ValueError("need at least 2 training points")
    if x.size < SMALL_TRAINING:
        warnings.warn(f"training sample of {x.size} < {SMALL_TRAINING}: amplified range "
                      "is truncated to the training range", RuntimeWarning, stacklevel=2)
    if h_nats is None:
        from .knn import knn_entropy
        h_nats = knn_entropy(x, k=4)
    hist = reference_histogram(x, h_nats, m0)
    idx = bin_index(hist, x).astype(float)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    out = np.empty(gain * x.size)
    for c, child in enumerate(ss.spawn(gain)):
        u = np.random.default_rng(child).random(x.size)
        out[c * x.size:(c + 1) * x.size] = hist.x_start + (idx + u) * hist.delta
    lineage = list(training.seed_lineage) if isinstance(training, Sample) else []
    if isinstance(seed, (int, np.integer)):
        lineage.append(int(seed))
    return Sample(out, provenance="generated", seed_lineage=lineage)


@dataclass
class AmplificationReport:
    n_train: int
    n_generated: int
    gain: float
    m_eff: float
    verdict: str
    m0: float = 2.0
    resolution_delta: float | None = None
    h_source: str | None = None
    kld_nats: float | None = None
    kld_sd_nats: float | None = None

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def verdict_for(meff: float, bound: float = BOUND, tol: float = VERDICT_TOL) -> str:
    if abs(meff - bound) <= tol:
        return "at_bound"
    return "within" if meff < bound else "exceeds"


def audit(n_train: int, n_gen: int, h_nats: float | None = None, m0: float = 2.0,
          h_source: str | None = None) -> AmplificationReport:
    """Check a (training, generated) event count pair against the bound."""
    if n_train < 2 or n_gen < 2:
        raise ValueError("event counts must be >= 2")
    me = 2.0 * math.log(n_gen) / math.log(n_train)
    delta = math.exp(h_nats) / math.sqrt(n_train) if h_nats is not None else None
    return AmplificationReport(int(n_train), int(n_gen), n_gen / n_train, me, verdict_for(me),
                               m0, delta, h_source if h_nats is not None else None)

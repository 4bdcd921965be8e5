"""Fixed-width histograms, their Shannon entropy and the M statistic.

The bin width follows from the differential entropy ``h`` and the sample size
``n`` as ``delta = exp(h) * n**(-1/M)``.  For a histogram built this way the
binned entropy comes out close to ``ln(n) / M`` whatever the pdf.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EmptyInputError",
    "Histogram",
    "Sample",
    "bin_width",
    "build",
    "histogram_from_csv",
    "m_from_entropy",
    "m_from_max_bin",
    "max_bin_entropy_bits",
    "mu_entries_per_bin",
    "shannon_entropy",
]

PROVENANCES = ("simulated", "generated", "ingested")


class EmptyInputError(ValueError):
    """Raised when an operation needs at least one observation."""


@dataclass
class Sample:
    """Ordered real observations of one variable plus where they came from."""

    values: np.ndarray
    provenance: str = "simulated"
    seed_lineage: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        if not np.all(np.isfinite(self.values)):
            bad = np.flatnonzero(~np.isfinite(self.values))[:5].tolist()
            raise ValueError(f"sample contains non-finite values at indices {bad}")

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.n


def _values(sample) -> np.ndarray:
    if isinstance(sample, Sample):
        return sample.values
    return np.asarray(sample, dtype=float).ravel()


@dataclass(frozen=True)
class Histogram:
    x_start: float
    delta: float
    counts: np.ndarray
    n_total: int
    # fraction of the last bin spanned by the data (< 1 when the range is
    # not a whole number of bins)
    last_coverage: float = 1.0

    @property
    def partial_last_bin(self) -> bool:
        return self.last_coverage < 1.0 - 1e-9

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def edges(self) -> np.ndarray:
        return self.x_start + self.delta * np.arange(self.n_bins + 1)

    @property
    def left_edges(self) -> np.ndarray:
        return self.edges[:-1]

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.n_total

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# x_start={self.x_start!r},delta={self.delta!r},n_total={self.n_total},"
                  f"last_coverage={self.last_coverage!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_index", "left_edge", "count"])
        for i, (edge, c) in enumerate(zip(self.left_edges, self.counts)):
            w.writerow([i, repr(float(edge)), int(c)])
        return buf.getvalue()


def histogram_from_csv(text: str) -> Histogram:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("histogram CSV must start with a '# x_start=...' header")
    meta = dict(kv.split("=", 1) for kv in lines[0][1:].strip().split(","))
    rows = list(csv.DictReader(lines[1:]))
    counts = np.array([int(r["count"]) for r in rows], dtype=np.int64)
    return Histogram(float(meta["x_start"]), float(meta["delta"]), counts, int(meta["n_total"]),
                     float(meta.get("last_coverage", 1.0)))


def bin_width(h_nats: float, n: int, m: float) -> float:
    """Bin width ``exp(h) * n**(-1/m)`` that gives entropy ``ln(n)/m``."""
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return math.exp(h_nats) * n ** (-1.0 / m)


def build(sample, delta: float, x_start: float | None = None) -> Histogram:
    """Bin ``sample`` into right-open bins of width ``delta`` from ``x_start``.

    The sample maximum is clamped into the last bin, so every value lands in
    exactly one bin and the counts always sum to ``n``.
    """
    x = _values(sample)
    if x.size == 0:
        raise EmptyInputError("cannot histogram an empty sample")
    if not delta > 0:
        raise ValueError(f"bin width must be positive, got {delta}")
    lo = float(x.min())
    if x_start is None:
        x_start = lo
    if x_start > lo:
        raise ValueError(f"x_start={x_start} exceeds the sample minimum {lo}")
    span = (float(x.max()) - x_start) / delta
    n_bins = max(1, math.ceil(span))
    idx = np.minimum(np.floor((x - x_start) / delta).astype(np.int64), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    coverage = min(1.0, max(span - (n_bins - 1), 0.0)) if span > 0 else 1.0
    return Histogram(float(x_start), float(delta), counts, int(x.size), coverage)


def bin_index(hist: Histogram, values) -> np.ndarray:
    """Bin numbers of ``values`` under the geometry of ``hist``."""
    x = _values(values)
    return np.clip(np.floor((x - hist.x_start) / hist.delta).astype(np.int64), 0, hist.n_bins - 1)


def _entropy_of_counts(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def shannon_entropy(hist) -> float:
    """Plug-in Shannon entropy ``-sum (n_i/N) ln(n_i/N)`` in nats.

    Accepts a :class:`Histogram` or a bare sequence of counts.
    """
    counts = hist.counts if isinstance(hist, Histogram) else hist
    if np.sum(counts) < 1:
        raise EmptyInputError("histogram has no entries")
    return _entropy_of_counts(counts)


def m_from_entropy(n: int, h_b: float) -> float:
    if not h_b > 0:
        raise ValueError(f"histogram entropy must be positive, got {h_b}")
    return math.log(n) / h_b


def max_bin_entropy_bits(n: int, n_max: int, uniform: bool = False) -> float:
    """Entropy estimate in bits from the tallest bin alone."""
    if not 1 <= n_max <= n:
        raise ValueError(f"need 1 <= n_max <= n, got n_max={n_max}, n={n}")
    return math.log2(n / n_max) + (0.0 if uniform else 1.0)


def m_from_max_bin(n: int, n_max: int, uniform: bool = False) -> float:
    return math.log2(n) / max_bin_entropy_bits(n, n_max, uniform)


def mu_entries_per_bin(n: int, m: float) -> float:
    """Mean entries per bin of a uniform histogram with ``n**(1/m)`` bins."""
    return n ** (1.0 - 1.0 / m)

"""Closed-form one-dimensional probability models.

Each model knows how to sample itself, evaluate its density and the
entropy-like shape quantities used throughout the package: the differential
entropy ``h``, the curvature of the pdf autocorrelation at zero lag, the
Rényi differential entropies ``r_q`` and the shape constants ``A``, ``F``
and Song's ``S``.  Everything is in nats.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "KINDS",
    "Cusp",
    "DistributionModel",
    "DivergenceError",
    "ModelError",
    "autocorr_second_derivative",
    "differential_entropy",
    "draw",
    "log_density_variance",
    "normalization",
    "parse_model",
    "renyi_differential",
    "sample",
    "shape_F",
    "song_S",
    "theoretical_A",
]

KINDS = ("uniform", "normal", "lognormal", "moyal", "exponential")

_EULER = 0.5772156649015329
_QUAD_TOL = 1e-10


class ModelError(ValueError):
    """Invalid model kind or parameters."""


class DivergenceError(ArithmeticError):
    """A Rényi integral does not converge for the requested order."""


@dataclass(frozen=True)
class Cusp:
    """Marker for an autocorrelation with a kink at zero lag.

    ``phi'(0+)`` is finite and non-zero so ``phi''(0)`` is not defined.  The
    bin-width cost then scales with ``M = 2`` instead of ``M = 3``.
    """

    first_derivative: float


@dataclass(frozen=True)
class DistributionModel:
    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        p = self.params
        expected = {"uniform": 2, "normal": 2, "lognormal": 2, "moyal": 0, "exponential": 1}
        if kind not in expected:
            raise ModelError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if len(p) != expected[kind]:
            raise ModelError(f"{kind} takes {expected[kind]} parameter(s), got {len(p)}")
        if not all(math.isfinite(v) for v in p):
            raise ModelError(f"{kind} parameters must be finite: {p}")
        if kind == "uniform" and not p[0] < p[1]:
            raise ModelError(f"uniform requires a < b, got {p}")
        if kind in ("normal", "lognormal") and not p[1] > 0:
            raise ModelError(f"{kind} requires sigma > 0, got {p[1]}")
        if kind == "exponential" and not p[0] > 0:
            raise ModelError(f"exponential requires rate > 0, got {p[0]}")

    # convenience constructors
    @classmethod
    def uniform(cls, a=0.0, b=1.0):
        return cls("uniform", (a, b))

    @classmethod
    def normal(cls, mu=0.0, sigma=1.0):
        return cls("normal", (mu, sigma))

    @classmethod
    def lognormal(cls, mu=0.0, sigma=1.0):
        return cls("lognormal", (mu, sigma))

    @classmethod
    def moyal(cls):
        return cls("moyal")

    @classmethod
    def exponential(cls, rate=1.0):
        return cls("exponential", (rate,))

    def __str__(self):
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(f'{p:g}' for p in self.params)})"

    @property
    def support(self) -> tuple[float, float]:
        """Interval outside which the pdf is below 1e-16 (or exactly zero)."""
        k, p = self.kind, self.params
        if k == "uniform":
            return p[0], p[1]
        if k == "normal":
            # exp(-z^2/2) / sqrt(2 pi) < 1e-16 beyond |z| ~ 8.5
            return p[0] - 9.0 * p[1], p[0] + 9.0 * p[1]
        if k == "lognormal":
            return 0.0, math.exp(p[0] + 9.0 * p[1])
        if k == "exponential":
            return 0.0, 38.0 / p[0]
        # Moyal: left tail dies as exp(-e^{-x}/2), right tail as exp(-x/2)
        return -5.0, 75.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if k == "uniform":
                out = np.where((x >= p[0]) & (x <= p[1]), 1.0 / (p[1] - p[0]), 0.0)
            elif k == "normal":
                z = (x - p[0]) / p[1]
                out = np.exp(-0.5 * z * z) / (p[1] * math.sqrt(2 * math.pi))
            elif k == "lognormal":
                pos = x > 0
                xs = np.where(pos, x, 1.0)
                z = (np.log(xs) - p[0]) / p[1]
                out = np.where(pos, np.exp(-0.5 * z * z) / (xs * p[1] * math.sqrt(2 * math.pi)), 0.0)
            elif k == "exponential":
                out = np.where(x >= 0, p[0] * np.exp(-p[0] * np.maximum(x, 0.0)), 0.0)
            else:
                out = np.exp(-0.5 * (x + np.exp(-x))) / math.sqrt(2 * math.pi)
        out = np.nan_to_num(out, nan=0.0, posinf=0.0)
        return out if out.ndim else float(out)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "normal":
                z = (x - p[0]) / p[1]
                out = -0.5 * z * z - math.log(p[1] * math.sqrt(2 * math.pi))
            elif k == "lognormal":
                z = (np.log(x) - p[0]) / p[1]
                out = np.where(x > 0, -0.5 * z * z - np.log(x) - math.log(p[1] * math.sqrt(2 * math.pi)), -np.inf)
            elif k == "exponential":
                out = np.where(x >= 0, math.log(p[0]) - p[0] * x, -np.inf)
            elif k == "moyal":
                out = -0.5 * (x + np.exp(-x)) - 0.5 * math.log(2 * math.pi)
            else:
                out = np.log(self.pdf(x))
        return out if np.ndim(out) else float(out)

    def dpdf(self, x):
        """First derivative of the density (away from support edges)."""
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        f = self.pdf(x)
        if k == "uniform":
            return np.zeros_like(x) if x.ndim else 0.0
        if k == "normal":
            return -f * (x - p[0]) / p[1] ** 2
        if k == "lognormal":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(x > 0, -f / x * (1.0 + (np.log(x) - p[0]) / p[1] ** 2), 0.0)
            return np.nan_to_num(out)
        if k == "exponential":
            return -p[0] * f
        return f * 0.5 * (np.exp(-x) - 1.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        if k == "uniform":
            return np.clip((x - p[0]) / (p[1] - p[0]), 0.0, 1.0)
        if k == "normal":
            return 0.5 * special.erfc(-(x - p[0]) / (p[1] * math.sqrt(2)))
        if k == "lognormal":
            with np.errstate(divide="ignore"):
                z = (np.log(np.maximum(x, 0.0)) - p[0]) / p[1]
            return 0.5 * special.erfc(-z / math.sqrt(2))
        if k == "exponential":
            return np.where(x > 0, -np.expm1(-p[0] * np.maximum(x, 0.0)), 0.0)
        return special.erfc(np.exp(-x / 2) / math.sqrt(2))

    def mean(self) -> float:
        k, p = self.kind, self.params
        if k == "uniform":
            return 0.5 * (p[0] + p[1])
        if k == "normal":
            return p[0]
        if k == "lognormal":
            return math.exp(p[0] + 0.5 * p[1] ** 2)
        if k == "exponential":
            return 1.0 / p[0]
        return _EULER + math.log(2.0)


def parse_model(text: str) -> DistributionModel:
    """Parse ``normal(0,1)``, ``lognormal(mu,sigma)``, ``uniform(a,b)``,
    ``moyal`` or ``exponential(rate)``."""
    m = re.fullmatch(r"\s*([A-Za-z]+)\s*(?:\(([^)]*)\))?\s*", text)
    if not m:
        raise ModelError(f"cannot parse model specification {text!r}")
    args = m.group(2)
    try:
        params = tuple(float(a) for a in args.split(",")) if args and args.strip() else ()
    except ValueError as exc:
        raise ModelError(f"non-numeric parameter in {text!r}") from exc
    return DistributionModel(m.group(1), params)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(model: DistributionModel, n: int, seed=None):
    """Draw ``n`` values from ``model`` as a :class:`~dataamp.histogram.Sample`.

    ``seed`` may be an integer, a ``SeedSequence`` or a ``Generator``.
    Moyal variates use ``X = -2 ln|Z|`` with ``Z`` standard normal.
    """
    from .histogram import Sample

    if n < 1:
        raise ModelError(f"sample size must be >= 1, got {n}")
    rng = _rng(seed)
    values = draw(model, n, rng)
    lineage = [int(seed)] if isinstance(seed, (int, np.integer)) else []
    return Sample(values, provenance="simulated", seed_lineage=lineage)


def draw(model: DistributionModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Raw ndarray variates; the workhorse behind :func:`sample`."""
    k, p = model.kind, model.params
    if k == "uniform":
        return rng.uniform(p[0], p[1], n)
    if k == "normal":
        return rng.normal(p[0], p[1], n)
    if k == "lognormal":
        return np.exp(rng.normal(p[0], p[1], n))
    if k == "exponential":
        return rng.exponential(1.0 / p[0], n)
    z = rng.standard_normal(n)
    return -2.0 * np.log(np.abs(z))


def _quad(func, model: DistributionModel, points=None) -> float:
    lo, hi = model.support
    val, _ = integrate.quad(func, lo, hi, epsabs=_QUAD_TOL, epsrel=1e-12, limit=1000, points=points)
    return val


def _breakpoints(model):
    k, p = model.kind, model.params
    if k == "lognormal":
        mode = math.exp(p[0] - p[1] ** 2)
        return [mode * 0.1, mode, math.exp(p[0]), math.exp(p[0] + p[1] ** 2)]
    if k == "moyal":
        return [0.0, 2.0, 10.0]
    return None


def differential_entropy(model: DistributionModel) -> float:
    k, p = model.kind, model.params
    if k == "uniform":
        return math.log(p[1] - p[0])
    if k == "normal":
        return 0.5 * math.log(2 * math.pi * math.e * p[1] ** 2)
    if k == "lognormal":
        return p[0] + 0.5 * math.log(2 * math.pi * math.e * p[1] ** 2)
    if k == "exponential":
        return 1.0 - math.log(p[0])

    def integrand(x):
        f = model.pdf(x)
        return -f * model.logpdf(x) if f > 0 else 0.0

    return _quad(integrand, model, _breakpoints(model))


def autocorr_second_derivative(model: DistributionModel):
    """``phi''(0) = integral of p * p''``, i.e. ``-integral of p'^2``.

    Returns a :class:`Cusp` when the autocorrelation has a kink at zero lag
    (pdfs with a jump discontinuity: uniform, exponential).
    """
    k, p = model.kind, model.params
    if k == "uniform":
        width = p[1] - p[0]
        return Cusp(first_derivative=-1.0 / width**2)
    if k == "exponential":
        # phi(tau) = (rate / 2) exp(-rate |tau|)
        return Cusp(first_derivative=-0.5 * p[0] ** 2)
    if k == "normal":
        return -1.0 / (4.0 * math.sqrt(math.pi) * p[1] ** 3)
    return -_quad(lambda x: float(model.dpdf(x)) ** 2, model, _breakpoints(model))


def theoretical_A(model: DistributionModel) -> float:
    """Shape constant ``-(1/12) phi''(0) exp(3h)`` of the under-binning cost."""
    curv = autocorr_second_derivative(model)
    if isinstance(curv, Cusp):
        if model.kind == "uniform":
            return 0.0
        raise ValueError(f"{model} has a cusp in its autocorrelation; A is undefined")
    return -curv * math.exp(3.0 * differential_entropy(model)) / 12.0


def renyi_differential(model: DistributionModel, q: float) -> float:
    """Rényi differential entropy ``r_q = ln(integral p^q) / (1 - q)``."""
    if q < 0:
        raise ValueError(f"Rényi order must be >= 0, got {q}")
    if q == 1:
        return differential_entropy(model)
    k, p = model.kind, model.params
    if k == "uniform":
        return math.log(p[1] - p[0])
    if q == 0:
        # integral of p^0 is the support length
        raise DivergenceError(f"r_0 diverges for {model}: unbounded support")
    if k == "normal":
        return 0.5 * math.log(2 * math.pi * p[1] ** 2) + math.log(q) / (2 * (q - 1))
    if k == "lognormal":
        return (p[0] + 0.5 * math.log(2 * math.pi * p[1] ** 2) + math.log(q) / (2 * (q - 1))
                + (1 - q) * p[1] ** 2 / (2 * q))
    if k == "exponential":
        return -math.log(p[0]) + math.log(q) / (q - 1)

    def integrand(x):
        lp = model.logpdf(x)
        return math.exp(q * lp) if np.isfinite(lp) else 0.0

    val = _quad(integrand, model, _breakpoints(model))
    if not (val > 0 and math.isfinite(val)):
        raise DivergenceError(f"integral of p^{q} diverges for {model}")
    return math.log(val) / (1 - q)


def shape_F(model: DistributionModel) -> float:
    """``F = exp(r_1 - r_2)``; 1 for the uniform, larger for heavier shapes."""
    return math.exp(differential_entropy(model) - renyi_differential(model, 2.0))


def song_S(model: DistributionModel) -> float:
    """Song's intrinsic shape measure, reported as ``Var(ln p(X))``.

    ``d r_q / dq`` at ``q = 1`` equals ``-Var(ln p) / 2``; the tabulated
    magnitudes (0.5 normal, 1 exponential, 0.5 + sigma^2 lognormal) are the
    plain variance, which is what this returns.
    """
    k, p = model.kind, model.params
    if k == "uniform":
        return 0.0
    if k == "normal":
        return 0.5
    if k == "exponential":
        return 1.0
    if k == "lognormal":
        return 0.5 + p[1] ** 2
    bp = _breakpoints(model)
    h = differential_entropy(model)

    def integrand(x):
        f = model.pdf(x)
        return f * (model.logpdf(x) + h) ** 2 if f > 0 else 0.0

    return _quad(integrand, model, bp)


def log_density_variance(model: DistributionModel) -> float:
    """``Var(ln p(X))``, the shape term of the kNN entropy variance."""
    return song_S(model)


def normalization(model: DistributionModel) -> float:
    """Numerical integral of the pdf over its support."""
    return _quad(lambda x: float(model.pdf(x)), model, _breakpoints(model))

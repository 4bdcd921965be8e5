"""Experiment configurations and the drivers that reproduce the figures/tables.

Every driver returns a dict ``{filename: text}``; writing to disk is left to
the caller so the same content can be compared byte for byte.  All
randomness flows from ``SeedSequence(config.seed)``.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__
from .amplifier import AmplificationReport, audit, gencopy, m_eff, meff_grid
from .cost import cost_scan, fit_A
from .distributions import (DistributionModel, differential_entropy, draw, parse_model,
                            renyi_differential, shape_F, song_S, theoretical_A)
from .histfit import amplitude_fit, fit_table_csv
from .histogram import _values, bin_width, build
from .io import ParseError, config_hash, provenance_header, rows_to_csv
from .knn import EstimationError, averaged_kld, kld_variance, knn_kld, knn_log_density_variance
from .renyi import estimate_F
from .svg import line_chart
from .transforms import TransformSpec, forward, mapped_amplify, parse_transform

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "KLD_COLUMNS",
    "kld_series",
    "load_config",
    "parse_config",
    "reproduce",
    "run",
    "run_audit",
    "run_cost_scan",
    "run_fit_table",
    "run_kld_scan",
    "run_preamp_scan",
    "run_table_a1",
]

EXPERIMENTS = ("cost_scan", "kld_scan", "preamp_scan", "fit_table", "table_a1", "audit")
DIRECTIONS = {
    "reference||generated": "q||p",
    "generated||reference": "p||q",
    "symmetric": "symmetric",
}
KLD_COLUMNS = ("series", "m_eff", "gain", "kld_nats", "kld_bits", "predicted_sd_bits", "k",
               "n_iter", "seed")
LN2 = math.log(2.0)


class ConfigError(ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "kld_scan"
    model: str = "normal(0,1)"
    models: tuple[str, ...] = ("uniform(0,1)", "normal(0,1)", "moyal", "lognormal(0,1)")
    n_train: int = 2000
    meff_max: float = 4.0
    gains: tuple[int, ...] = ()
    k: tuple[int, ...] = (1,)
    n_iterations: int = 16
    seed: int = 0
    n_seeds: int = 1
    transform: str = "identity"
    direction: str = "reference||generated"
    n_pre: int = 500
    g_pre: int = 4
    gain: int = 45
    fit_bin_width: float = 0.1
    fit_ranges: tuple[tuple[float, float], ...] = ((0.0, 40.0), (0.0, 20.0))
    m_bins: float = 2.5
    out: str = "out"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}", key="experiment")
        for name in ("n_train", "n_iterations", "n_seeds", "n_pre", "g_pre", "gain"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", key=name)
        if self.n_train < 2:
            raise ConfigError("must be >= 2", key="n_train")
        if any(k < 1 for k in self.k):
            raise ConfigError("neighbour orders must be >= 1", key="k")
        if any(g < 1 for g in self.gains):
            raise ConfigError("gains must be >= 1", key="gains")
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"must be one of {sorted(DIRECTIONS)}", key="direction")
        if not 2.0 <= self.meff_max <= 6.0:
            raise ConfigError("must lie in [2, 6]", key="meff_max")
        try:
            parse_model(self.model)
            for m in self.models:
                parse_model(m)
        except ValueError as exc:
            raise ConfigError(str(exc), key="model") from None
        try:
            parse_transform(self.transform)
        except ValueError as exc:
            raise ConfigError(str(exc), key="transform") from None

    @property
    def model_obj(self) -> DistributionModel:
        return parse_model(self.model)

    @property
    def transform_spec(self) -> TransformSpec:
        return parse_transform(self.transform)

    def canonical(self) -> str:
        """``key=value`` lines in field order; the config hash is taken over this."""
        lines = []
        for f in fields(self):
            if f.name == "out":
                continue
            lines.append(f"{f.name}={_render(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        return config_hash(self.canonical())

    def header(self) -> str:
        return provenance_header(self.hash, self.seed)


def _render(v):
    if isinstance(v, tuple):
        return ";".join(_render(x) if not isinstance(x, tuple) else ":".join(map(str, x)) for x in v)
    return str(v)


_INT_LIST = ("k", "gains")
_STR_LIST = ("models",)


def _coerce(name, raw: str):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise KeyError(name)
    t = types[name]
    raw = raw.strip()
    if name in _INT_LIST:
        return tuple(int(v) for v in raw.replace(";", ",").split(",") if v.strip())
    if name in _STR_LIST:
        return tuple(v.strip() for v in raw.split(";") if v.strip())
    if name == "fit_ranges":
        out = []
        for part in raw.split(";"):
            lo, hi = part.split(":")
            out.append((float(lo), float(hi)))
        return tuple(out)
    if t == "int":
        return int(raw)
    if t == "float":
        return float(raw)
    return raw


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse INI-style ``key = value`` text (sections are informational).

    Errors carry the offending line number and key.
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True, delimiters=("=",))
    parser.optionxform = str
    body = text if text.lstrip().startswith("[") else "[experiment]\n" + text
    offset = 0 if body is text else -1
    try:
        parser.read_string(body, source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"{source}: {exc.message if hasattr(exc, 'message') else exc}",
                          line=None if line is None else line + offset) from None
    lines = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith(("#", ";", "[")) and "=" in s:
            key = s.split("=", 1)[0].strip()
            lines.setdefault(key, i)
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key == "kind":
                key = "experiment"
            try:
                values[key] = _coerce(key, raw)
            except KeyError:
                raise ConfigError(f"{source}: unknown key", line=lines.get(key), key=key) from None
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value {raw!r} ({exc})",
                                  line=lines.get(key), key=key) from None
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        key = exc.key
        line = lines.get(key if key != "experiment" else "kind", lines.get(key))
        raise ConfigError(f"{source}: {str(exc).split(': ', 1)[-1]}", line=line, key=key) from None


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


# --------------------------------------------------------------------------
# KLD scans

def _child_seed(rng: np.random.Generator) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(rng.integers(0, 2**63)))


def transformed_entropy(model: DistributionModel, spec: TransformSpec, training=None) -> float:
    """Differential entropy of the mapped variable; analytic when possible."""
    if spec.family == "identity":
        return differential_entropy(model)
    if spec.is_log and model.kind == "lognormal":
        mu, sigma = model.params
        return differential_entropy(DistributionModel.normal(mu, sigma))
    if training is None:
        raise ValueError("training data needed to estimate the mapped entropy")
    from .knn import knn_entropy
    return knn_entropy(forward(spec, training), k=4)


def _var_log_p(model, spec, training):
    """Var(ln p) of the amplified variable: analytic if known, else kNN plug-in."""
    if spec.family == "identity":
        return song_S(model), "model"
    if spec.is_log and model.kind == "lognormal":
        return 0.5, "model"
    return knn_log_density_variance(forward(spec, training), k=4), "knn plug-in"


@dataclass
class ScanPoint:
    series: str
    gain: int
    m_eff: float
    k: int
    single: float
    averaged: float
    sd_single: float
    sd_averaged: float
    n_iter: int
    seed: int
    values: tuple = field(default=(), repr=False)


def kld_series(model: DistributionModel, training, grid, *, k: int = 1, n_iter: int = 16,
               seed=0, spec: TransformSpec | None = None, h_nats: float | None = None,
               direction: str = "reference||generated", series: str = "gencopy",
               n_resolution: int | None = None, seed_label: int = 0) -> list[ScanPoint]:
    """KLD between amplified ``training`` and fresh model samples along ``grid``.

    ``grid`` holds (gain, M_eff) pairs.  At each point every iteration
    re-randomises the amplified copies and draws a new reference sample of
    the same size; the training sample itself stays fixed.
    """
    x = _values(training)
    n = x.size
    spec = spec or TransformSpec("identity")
    if h_nats is None:
        h_nats = transformed_entropy(model, spec, x)
    var_log_p, source = _var_log_p(model, spec, x)
    n_res = n if n_resolution is None else n_resolution
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    out = []
    for (gain, me), point_ss in zip(grid, ss.spawn(len(grid))):
        def p_gen(rng, gain=gain):
            if spec.family == "identity":
                return gencopy(x, gain, h_nats, _child_seed(rng)).values
            return mapped_amplify(x, spec, gain, _child_seed(rng), h_nats).values

        def q_gen(rng, gain=gain):
            return draw(model, gain * n, rng)

        est = averaged_kld(p_gen, q_gen, k, n_iter, point_ss, direction=DIRECTIONS[direction],
                           n_resolution=n_res, var_log_p=var_log_p, var_log_p_source=source)
        sd1 = math.sqrt(kld_variance(gain * n, 1, k=k, var_log_p=var_log_p, n_resolution=n_res))
        out.append(ScanPoint(series, gain, me, k, est.values[0], est.value_nats, sd1,
                             est.predicted_sd_nats, est.n_iterations, seed_label, est.values))
    return out


def _grid(cfg: ExperimentConfig, n: int):
    if cfg.gains:
        return [(g, m_eff(n, g * n)) for g in cfg.gains]
    return meff_grid(n, cfg.meff_max)


def _kld_rows(points):
    rows = []
    for p in points:
        rows.append((p.series, p.m_eff, p.gain, p.single, p.single / LN2, p.sd_single / LN2,
                     p.k, 1, p.seed))
        if p.n_iter > 1:
            rows.append((p.series, p.m_eff, p.gain, p.averaged, p.averaged / LN2,
                         p.sd_averaged / LN2, p.k, p.n_iter, p.seed))
    return rows


def _kld_svg(points, title, by_gain=False):
    series = {}
    for p in points:
        entries = [(f"{p.series} k={p.k} N_I=1", p.single, p.sd_single)]
        if p.n_iter > 1:
            entries.append((f"{p.series} k={p.k} N_I={p.n_iter}", p.averaged, p.sd_averaged))
        for label, val, sd in entries:
            s = series.setdefault(label, ([], [], []))
            s[0].append(p.gain if by_gain else p.m_eff)
            s[1].append(val / LN2)
            s[2].append(sd / LN2)
    return line_chart(series, title, "gain" if by_gain else "M_eff", "KLD (bits)", logx=by_gain,
                      hline=0.0)


def _training(model, n, ss: np.random.SeedSequence):
    return draw(model, n, np.random.default_rng(ss))


def run_kld_scan(cfg: ExperimentConfig) -> dict[str, str]:
    """KLD versus M_eff for GenCopy (or mapped GenCopy) against fresh data."""
    model = cfg.model_obj
    spec = cfg.transform_spec
    points = []
    for s, seed_ss in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.n_seeds)):
        train_ss, scan_ss = seed_ss.spawn(2)
        training = _training(model, cfg.n_train, train_ss)
        grid = _grid(cfg, cfg.n_train)
        for k, k_ss in zip(cfg.k, scan_ss.spawn(len(cfg.k))):
            label = "mapped" if spec.family != "identity" else "gencopy"
            points += kld_series(model, training, grid, k=k, n_iter=cfg.n_iterations, seed=k_ss,
                                 spec=spec, direction=cfg.direction, series=label, seed_label=s)
    csv_text = rows_to_csv(KLD_COLUMNS, _kld_rows(points), cfg.header())
    title = f"KLD vs M_eff, {model}, N={cfg.n_train}"
    return {"kld_scan.csv": csv_text, "kld_scan.svg": _kld_svg(points, title)}


def preamp_points(cfg: ExperimentConfig, seed_ss: np.random.SeedSequence, seed_label=0):
    """Pre-amplified (n_pre x g_pre) and directly trained control scans."""
    model = cfg.model_obj
    h = differential_entropy(model)
    n_mid = cfg.n_pre * cfg.g_pre
    pre_ss, ctrl_ss, scan_pre, scan_ctrl, amp_ss = seed_ss.spawn(5)
    small = _training(model, cfg.n_pre, pre_ss)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        pre = gencopy(small, cfg.g_pre, h, amp_ss).values
    control = _training(model, n_mid, ctrl_ss)
    grid = _grid(cfg, n_mid)
    k = cfg.k[0]
    pts = kld_series(model, pre, grid, k=k, n_iter=cfg.n_iterations, seed=scan_pre, h_nats=h,
                     direction=cfg.direction, series="preamplified", seed_label=seed_label)
    pts += kld_series(model, control, grid, k=k, n_iter=cfg.n_iterations, seed=scan_ctrl,
                      h_nats=h, direction=cfg.direction, series="control", seed_label=seed_label)
    return pts


def run_preamp_scan(cfg: ExperimentConfig) -> dict[str, str]:
    points = []
    for s, seed_ss in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.n_seeds)):
        points += preamp_points(cfg, seed_ss, s)
    csv_text = rows_to_csv(KLD_COLUMNS, _kld_rows(points), cfg.header())
    title = f"pre-amplified N={cfg.n_pre}x{cfg.g_pre} vs control N={cfg.n_pre * cfg.g_pre}"
    return {"preamp_scan.csv": csv_text, "preamp_scan.svg": _kld_svg(points, title)}


# --------------------------------------------------------------------------
# cost functions, shape factors, amplitude fits

def run_cost_scan(cfg: ExperimentConfig) -> dict[str, str]:
    rows, summary, series = [], [], {}
    for i, (name, ss) in enumerate(zip(cfg.models, np.random.SeedSequence(cfg.seed).spawn(len(cfg.models)))):
        model = parse_model(name)
        h = differential_entropy(model)
        x = draw(model, cfg.n_train, np.random.default_rng(ss))
        scan = cost_scan(x, h)
        A = fit_A(scan)
        try:
            a_theory = theoretical_A(model)
        except ValueError:
            a_theory = float("nan")
        model_curve = scan.model_curve()
        for m, d, c, cn, mc in zip(scan.m_grid, scan.deltas, scan.raw_cost, scan.normalized_cost,
                                   model_curve):
            rows.append((str(model), f"{m:.1f}", d, c, cn, mc))
        summary.append((str(model), cfg.n_train, A, a_theory))
        # display offset only; stored values are never shifted
        series[str(model)] = (list(scan.m_grid), list(scan.normalized_cost + 0.05 * i))
    head = cfg.header()
    return {
        "cost_scan.csv": rows_to_csv(("model", "M", "delta", "raw_cost", "normalized_cost",
                                      "model_CNR_at_fitted_A"), rows, head),
        "cost_fit.csv": rows_to_csv(("model", "n", "fitted_A", "theoretical_A"), summary, head),
        "cost_scan.svg": line_chart(series, f"normalised cost, N={cfg.n_train} (offset 0.05)",
                                    "M", "normalised cost", hline=0.0),
    }


def run_table_a1(cfg: ExperimentConfig) -> dict[str, str]:
    names = ("uniform(0,1)", "normal(0,1)", "exponential(1)", "moyal", "lognormal(0,1)")
    rows = []
    n = cfg.n_train
    for name, ss in zip(names, np.random.SeedSequence(cfg.seed).spawn(len(names))):
        model = parse_model(name)
        h = differential_entropy(model)
        r2 = renyi_differential(model, 2.0)
        x = draw(model, n, np.random.default_rng(ss))
        hist = build(x, bin_width(h, n, cfg.m_bins))
        f_mu, f_e = estimate_F(hist, n, cfg.m_bins)
        rows.append((str(model), h - r2, shape_F(model), song_S(model), f_mu, f_e))
    return {"table_a1.csv": rows_to_csv(("distribution", "r1_minus_r2_model", "F_model", "S_model",
                                         "F_mu_data", "F_E_data"), rows, cfg.header())}


def fit_datasets(cfg: ExperimentConfig, ss: np.random.SeedSequence):
    """Full simulation, GenCopy and mapped GenCopy samples of equal size."""
    model = cfg.model_obj
    full_ss, train_ss, amp_ss, map_ss = ss.spawn(4)
    n_big = cfg.gain * cfg.n_train
    full = draw(model, n_big, np.random.default_rng(full_ss))
    training = draw(model, cfg.n_train, np.random.default_rng(train_ss))
    gen = gencopy(training, cfg.gain, differential_entropy(model), amp_ss).values
    spec = cfg.transform_spec if cfg.transform != "identity" else TransformSpec("log")
    mapped = mapped_amplify(training, spec, cfg.gain, map_ss,
                            transformed_entropy(model, spec, training)).values
    return {"full": full, "gencopy": gen, "mapped": mapped}


def fit_results(cfg: ExperimentConfig, ss=None):
    ss = np.random.SeedSequence(cfg.seed) if ss is None else ss
    data = fit_datasets(cfg, ss)
    results = []
    model = cfg.model_obj
    for rng_ in cfg.fit_ranges:
        for label, x in data.items():
            r = amplitude_fit(x, model, rng_, cfg.fit_bin_width, label=f"{model} {label}")
            r.gain = 1 if label == "full" else cfg.gain
            r.n = x.size if label == "full" else cfg.n_train
            results.append(r)
    return results, data


def run_fit_table(cfg: ExperimentConfig) -> dict[str, str]:
    results, data = fit_results(cfg)
    lo, hi = cfg.fit_ranges[0]
    edges = lo + cfg.fit_bin_width * np.arange(int(round((hi - lo) / cfg.fit_bin_width)) + 1)
    centres = 0.5 * (edges[:-1] + edges[1:])
    counts = {k: np.histogram(v, bins=edges)[0] for k, v in data.items()}
    model = cfg.model_obj
    expected = len(data["full"]) * np.diff(model.cdf(edges))
    hist_rows = [(c, *(int(counts[k][i]) for k in data), expected[i]) for i, c in enumerate(centres)]
    series = {k: (list(centres), list(counts[k].astype(float))) for k in data}
    series["model"] = (list(centres), list(expected))
    return {
        "fit_table.csv": cfg.header() + fit_table_csv(results),
        "fit_histograms.csv": rows_to_csv(("x_centre", *data.keys(), "model_expected"), hist_rows,
                                          cfg.header()),
        "fit_histograms.svg": line_chart(series, f"{model}: full vs amplified, G={cfg.gain}",
                                         "x", "entries / bin"),
    }


# --------------------------------------------------------------------------
# audit

def run_audit(train, gen, *, k: int = 1, h_nats: float | None = None) -> AmplificationReport:
    """Audit counts, or two samples (arrays / :class:`Sample`) of events."""
    if isinstance(train, (int, np.integer)) and isinstance(gen, (int, np.integer)):
        return audit(int(train), int(gen), h_nats, h_source="supplied" if h_nats is not None else None)
    xt, xg = _values(train), _values(gen)
    h_source = "supplied"
    if h_nats is None:
        from .knn import knn_entropy
        h_nats = knn_entropy(xt, k=4)
        h_source = "knn(k=4) on training sample"
    report = audit(xt.size, xg.size, h_nats, h_source=h_source)
    if xt.size == xg.size and np.array_equal(np.sort(xt), np.sort(xg)):
        report.kld_nats = 0.0
    else:
        try:
            report.kld_nats = knn_kld(xt, xg, k)
        except EstimationError as exc:
            warnings.warn(f"KLD not computed: {exc}", RuntimeWarning)
    var = kld_variance(max(xg.size, 2), 1, k=k, n_resolution=xt.size,
                       var_log_p=knn_log_density_variance(xt, k=4))
    report.kld_sd_nats = math.sqrt(var)
    return report


# --------------------------------------------------------------------------
# dispatch and figure reproduction

def run(cfg: ExperimentConfig) -> dict[str, str]:
    drivers = {
        "cost_scan": run_cost_scan,
        "kld_scan": run_kld_scan,
        "preamp_scan": run_preamp_scan,
        "fit_table": run_fit_table,
        "table_a1": run_table_a1,
    }
    if cfg.experiment not in drivers:
        raise ConfigError(f"experiment {cfg.experiment!r} is not a batch experiment", key="experiment")
    return drivers[cfg.experiment](cfg)


FIGURES = ("fig1", "fig3", "fig4", "fig5", "fig6", "fig7b")


def figure_config(figure: str, **overrides) -> ExperimentConfig:
    """Full-scale defaults for each figure, with CLI overrides applied."""
    base = {
        "fig1": dict(experiment="cost_scan", n_train=10000),
        "fig3": dict(experiment="kld_scan", model="normal(0,1)", n_train=2000, k=(1,)),
        "fig4": dict(experiment="kld_scan", model="lognormal(0,1)", n_train=2000, k=(1, 4)),
        "fig5": dict(experiment="preamp_scan", model="normal(0,1)", n_pre=500, g_pre=4, meff_max=3.5),
        "fig6": dict(experiment="fit_table", model="lognormal(0,1)", n_train=2000, gain=45,
                     transform="log"),
    }
    if figure not in base:
        raise ValueError(f"no default configuration for {figure}")
    params = dict(base[figure])
    params.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**params)


def reproduce(figure: str, *, fig7b_csv: str | None = None, fig7b_n_train: int | None = None,
              **overrides) -> dict[str, str]:
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    if figure == "fig7b":
        if fig7b_csv is None or fig7b_n_train is None:
            raise ValueError("fig7b needs a CSV of (generated_events, error) and the training count")
        return replot_meff(fig7b_csv, fig7b_n_train)
    cfg = figure_config(figure, **overrides)
    if figure != "fig4":
        return run(cfg)
    # lognormal direct (k=1, 4) and log-mapped (k=1) series
    files = run_kld_scan(cfg)
    mapped = run_kld_scan(replace(cfg, transform="log", k=(1,)))
    direct_rows = files["kld_scan.csv"].split("\n", 2)[2]
    mapped_rows = mapped["kld_scan.csv"].split("\n", 2)[2]
    text = cfg.header() + ",".join(KLD_COLUMNS) + "\n" + direct_rows + mapped_rows
    reader = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
    by_meff, by_gain = {}, {}
    for r in reader:
        if int(r["n_iter"]) != cfg.n_iterations and cfg.n_iterations != 1:
            continue
        key = f"{r['series']} k={r['k']}"
        for store, x in ((by_meff, float(r["m_eff"])), (by_gain, float(r["gain"]))):
            s = store.setdefault(key, ([], [], []))
            s[0].append(x)
            s[1].append(float(r["kld_bits"]))
            s[2].append(float(r["predicted_sd_bits"]))
    return {
        "fig4_kld.csv": text,
        "fig4a_kld_vs_meff.svg": line_chart(by_meff, "lognormal: direct vs mapped", "M_eff",
                                            "KLD (bits)", hline=0.0),
        "fig4b_kld_vs_gain.svg": line_chart(by_gain, "lognormal: KLD vs gain", "gain",
                                            "KLD (bits)", logx=True, hline=0.0),
    }


def replot_meff(csv_path: str, n_train: int) -> dict[str, str]:
    """Re-axis (generated_events, error) pairs onto M_eff for a given training size."""
    with open(csv_path, encoding="utf-8") as fh:
        text = fh.read()
    rows = []
    data_lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(data_lines)
    for lineno, rec in enumerate(reader, start=1):
        if lineno == 1 and not _numeric(rec[0]):
            continue
        try:
            ng, err = float(rec[0]), float(rec[1])
        except (ValueError, IndexError):
            raise ParseError(f"{csv_path}: expected generated_events,error; got {rec}", lineno) from None
        rows.append((int(round(ng)), err, 2.0 * math.log(ng) / math.log(n_train)))
    rows.sort()
    head = provenance_header(config_hash(f"fig7b n_train={n_train}\n" + text), "none")
    series = {f"N={n_train}": ([r[2] for r in rows], [r[1] for r in rows])}
    return {
        "fig7b.csv": rows_to_csv(("generated_events", "error", "m_eff"), rows, head),
        "fig7b.svg": line_chart(series, f"error vs M_eff (N={n_train})", "M_eff", "error"),
    }


def _numeric(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def version() -> str:
    return __version__

"""Command line interface: ``dataamp <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .amplifier import gencopy
from .distributions import differential_entropy, parse_model, sample
from .experiments import (FIGURES, ConfigError, ExperimentConfig, load_config, reproduce, run,
                          run_audit)
from .histogram import (EmptyInputError, bin_width, build, m_from_entropy, m_from_max_bin,
                        max_bin_entropy_bits, shannon_entropy)
from .io import (ParseError, config_hash, format_sample, ingest_sample, provenance_header,
                 rows_to_csv, write_text)
from .knn import knn_entropy
from .renyi import discrete_renyi, estimate_F
from .transforms import mapped_amplify, parse_transform

__all__ = ["main"]


def _int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _emit(record: dict, fmt: str, out: str | None, header: str = "") -> None:
    if fmt == "json":
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    else:
        text = rows_to_csv(list(record), [list(record.values())], header)
    if out:
        write_text(out, text)
        print(out)
    else:
        sys.stdout.write(text)


def _write_files(files: dict[str, str], out: str) -> None:
    for name in sorted(files):
        print(write_text(Path(out) / name, files[name]))


def _sample_from(args):
    if args.input:
        return ingest_sample(args.input)
    if args.model is None:
        raise ValueError("give --input or --model")
    return sample(parse_model(args.model), args.n, args.seed)


def _config(args, experiment: str, **fields) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig(
        experiment=experiment)
    updates = {k: v for k, v in fields.items() if v is not None}
    return replace(cfg, experiment=experiment, **updates)


# --------------------------------------------------------------------------
# subcommands

def cmd_sample(args):
    model = parse_model(args.model)
    s = sample(model, args.n, args.seed)
    head = provenance_header(config_hash(f"sample model={model} n={args.n}\n"), args.seed)
    text = head + format_sample(s.values)
    if args.out:
        write_text(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)


def cmd_binwidth(args):
    if args.h is not None:
        h, src = args.h, "supplied"
    elif args.input:
        h, src = knn_entropy(ingest_sample(args.input), k=4), "knn(k=4)"
    elif args.model:
        h, src = differential_entropy(parse_model(args.model)), "model"
    else:
        raise ValueError("give --h, --input or --model")
    d = bin_width(h, args.n, args.m)
    _emit({"n": args.n, "M": args.m, "h_nats": h, "h_source": src, "delta": d}, args.format,
          args.out)


def cmd_entropy(args):
    s = _sample_from(args)
    n = s.n
    if args.delta is not None:
        delta = args.delta
    else:
        h = differential_entropy(parse_model(args.model)) if args.model and not args.input \
            else knn_entropy(s, k=4)
        delta = bin_width(h, n, args.m)
    hist = build(s, delta)
    h_b = shannon_entropy(hist)
    hx = max_bin_entropy_bits(n, int(hist.counts.max()), uniform=args.uniform)
    rec = {
        "n": n,
        "delta": delta,
        "n_bins": hist.n_bins,
        "H_B_nats": h_b,
        "M_B": m_from_entropy(n, h_b),
        "H_X_bits": hx,
        "M_X": m_from_max_bin(n, int(hist.counts.max()), uniform=args.uniform),
        "R2_nats": discrete_renyi(hist, 2.0),
        "knn_entropy_nats": knn_entropy(s, k=args.k),
    }
    if args.m is not None and args.delta is None:
        rec["F_mu"], rec["F_E"] = estimate_F(hist, n, args.m)
    _emit(rec, args.format, args.out)


def cmd_cost_scan(args):
    fields = dict(n_train=args.n, seed=args.seed)
    if args.model:
        fields["models"] = tuple(args.model)
    _write_files(run(_config(args, "cost_scan", **fields)), args.out)


def cmd_amplify(args):
    training = ingest_sample(args.input) if args.input else sample(
        parse_model(args.model), args.n, args.seed)
    spec = parse_transform(args.transform)
    if spec.family == "identity":
        out = gencopy(training, args.gain, args.h, args.seed)
    else:
        out = mapped_amplify(training, spec, args.gain, args.seed, args.h)
    head = provenance_header(
        config_hash(f"amplify gain={args.gain} transform={spec} h={args.h}\n"), args.seed)
    text = head + format_sample(out.values)
    if args.out:
        write_text(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)


def cmd_kld_scan(args):
    cfg = _config(args, "kld_scan", model=args.model, n_train=args.n, meff_max=args.meff_max,
                  k=args.k, n_iterations=args.iters, seed=args.seed, n_seeds=args.seeds,
                  transform=args.transform, gains=args.gains)
    _write_files(run(cfg), args.out)


def cmd_preamp_scan(args):
    cfg = _config(args, "preamp_scan", model=args.model, n_pre=args.n_pre, g_pre=args.g_pre,
                  meff_max=args.meff_max, k=args.k, n_iterations=args.iters, seed=args.seed,
                  n_seeds=args.seeds, gains=args.gains)
    _write_files(run(cfg), args.out)


def cmd_fit_table(args):
    cfg = _config(args, "fit_table", model=args.model, n_train=args.n, gain=args.gain,
                  transform=args.transform, seed=args.seed)
    _write_files(run(cfg), args.out)


def cmd_table_a1(args):
    cfg = _config(args, "table_a1", n_train=args.n, seed=args.seed, m_bins=args.m)
    _write_files(run(cfg), args.out)


def cmd_audit(args):
    if args.train and args.gen:
        report = run_audit(ingest_sample(args.train), ingest_sample(args.gen), k=args.k,
                           h_nats=args.h)
    elif args.n_train and args.n_gen:
        report = run_audit(args.n_train, args.n_gen, h_nats=args.h)
    else:
        raise ValueError("give --train/--gen files or --n-train/--n-gen counts")
    if args.format == "json":
        text = report.to_json()
        if args.out:
            write_text(args.out, text)
            print(args.out)
        else:
            sys.stdout.write(text)
    else:
        rec = {k: v for k, v in vars(report).items() if v is not None}
        _emit(rec, "csv", args.out)


def cmd_reproduce(args):
    overrides = dict(n_train=args.n, meff_max=args.meff_max, n_iterations=args.iters,
                     seed=args.seed, n_seeds=args.seeds, gains=args.gains, k=args.k)
    files = reproduce(args.figure, fig7b_csv=args.csv, fig7b_n_train=args.n_train, **overrides)
    _write_files(files, Path(args.out) / args.figure)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dataamp", description=__doc__)
    p.add_argument("--version", action="version", version=f"dataamp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, n=None, out=None, fmt=False, cfg=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n", type=int, default=n)
        sp.add_argument("--out", default=out)
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="json")
        if cfg:
            sp.add_argument("--config", help="INI-style experiment file; flags override it")

    sp = sub.add_parser("sample", help="draw events from a model")
    sp.add_argument("--model", required=True)
    common(sp, n=1000)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("binwidth", help="entropy-based bin width")
    sp.add_argument("--m", type=float, default=2.0)
    sp.add_argument("--h", type=float, help="differential entropy in nats")
    sp.add_argument("--model")
    sp.add_argument("--input")
    common(sp, n=1000, fmt=True)
    sp.set_defaults(func=cmd_binwidth)

    sp = sub.add_parser("entropy", help="histogram entropies and M estimators")
    sp.add_argument("--model")
    sp.add_argument("--input")
    sp.add_argument("--m", type=float, default=2.0)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--uniform", action="store_true", help="data is known to be uniform")
    common(sp, n=1000, fmt=True)
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("cost-scan", help="normalised cost versus M and fitted A")
    sp.add_argument("--model", action="append", help="repeatable")
    common(sp, out="out/cost_scan", cfg=True)
    sp.set_defaults(func=cmd_cost_scan)

    sp = sub.add_parser("amplify", help="GenCopy (optionally through a transform)")
    sp.add_argument("--input")
    sp.add_argument("--model")
    sp.add_argument("--gain", type=int, required=True)
    sp.add_argument("--transform", default="identity")
    sp.add_argument("--h", type=float, help="entropy in the amplified space, nats")
    common(sp, n=2000)
    sp.set_defaults(func=cmd_amplify)

    for name, func, help_ in (("kld-scan", cmd_kld_scan, "KLD versus M_eff"),
                              ("preamp-scan", cmd_preamp_scan, "pre-amplified vs control KLD")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--model")
        sp.add_argument("--meff-max", type=float)
        sp.add_argument("--k", type=_int_list, help="comma separated, e.g. 1,4")
        sp.add_argument("--iters", type=int)
        sp.add_argument("--seeds", type=int)
        sp.add_argument("--gains", type=_int_list, help="explicit gain list instead of the M_eff grid")
        if name == "kld-scan":
            sp.add_argument("--transform")
        else:
            sp.add_argument("--n-pre", type=int)
            sp.add_argument("--g-pre", type=int)
        common(sp, out=f"out/{name.replace('-', '_')}", cfg=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("fit-table", help="amplitude fits of full and amplified samples")
    sp.add_argument("--model")
    sp.add_argument("--gain", type=int)
    sp.add_argument("--transform")
    common(sp, out="out/fit_table", cfg=True)
    sp.set_defaults(func=cmd_fit_table)

    sp = sub.add_parser("table-a1", help="shape factors from models and data")
    sp.add_argument("--m", type=float)
    common(sp, out="out/table_a1", cfg=True)
    sp.set_defaults(func=cmd_table_a1)

    sp = sub.add_parser("audit", help="check generated vs training sizes against the bound")
    sp.add_argument("--train")
    sp.add_argument("--gen")
    sp.add_argument("--n-train", type=int)
    sp.add_argument("--n-gen", type=int)
    sp.add_argument("--h", type=float)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("reproduce", help="regenerate a figure's data and chart")
    sp.add_argument("figure", choices=FIGURES)
    sp.add_argument("--n", type=int)
    sp.add_argument("--meff-max", type=float)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--gains", type=_int_list)
    sp.add_argument("--k", type=_int_list)
    sp.add_argument("--csv", help="fig7b: CSV of generated_events,error")
    sp.add_argument("--n-train", type=int, help="fig7b: training sample size")
    sp.add_argument("--out", default="out")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"dataamp: config error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, EmptyInputError, ValueError, ArithmeticError, OSError) as exc:
        print(f"dataamp: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

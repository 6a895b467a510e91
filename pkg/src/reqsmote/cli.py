"""Command-line entry point.

Settings are resolved as: command-line flags, then the ``[reqsmote]``
section of an INI file given with ``--config``, then built-in defaults.
``REQSMOTE_DATA_DIR`` supplies the directory searched for
``PROMISE_exp.csv`` when ``--data`` is omitted and for relative ``--data``
paths that do not exist as given.

Errors print one line ``error[<Code>]: <message>`` on stderr. Exit status is
2 for configuration errors, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import models as _models
from . import vectorizer as _vec
from .corpus import (LABEL_NAMES, PROMISE_EXP_SCHEMA, CsvSchema, Label, class_distribution, distribution_table,
                     load_promise_csv)
from .errors import ReqSmoteError
from .evaluation import METRICS, format_table
from .harness import ExperimentConfig, resample, run_cv, train_final
from .resampler import SmoteParams

DATA_DIR_ENV = "REQSMOTE_DATA_DIR"
DEFAULT_DATA_FILE = "PROMISE_exp.csv"

DEFAULTS = {
    "schema": "auto",
    "text_col": None,
    "label_col": None,
    "id_col": None,
    "models": "lr",
    "model": "lr",
    "resample": "smote-tomek",
    "k": 10,
    "seed": 42,
    "smote_k": 5,
    "C": 10.0,
    "format": "table",
    "output": None,
    "fold_csv": None,
    "jobs": 1,
    "top": 10,
    "show_resampled": 0,
}
_INT_KEYS = {"k", "seed", "smote_k", "jobs", "top", "show_resampled"}
_FLOAT_KEYS = {"C"}


class ConfigError(ReqSmoteError):
    code = "ConfigError"


class _Parser(argparse.ArgumentParser):
    """argparse with the same one-line error format as the rest of the CLI."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"error[UsageError]: {message}\n")


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help=f"requirements CSV (default: ${DATA_DIR_ENV}/{DEFAULT_DATA_FILE})")
    p.add_argument("--schema", choices=["auto", "canonical", "promise"])
    p.add_argument("--text-col", dest="text_col", help="override the text column name")
    p.add_argument("--label-col", dest="label_col", help="override the label column name")
    p.add_argument("--id-col", dest="id_col", help="override the id column name")


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resample", choices=["none", "smote", "smote-tomek"])
    p.add_argument("--k", type=int, help="number of folds (default 10)")
    p.add_argument("--seed", type=int, help="master seed (default 42)")
    p.add_argument("--smote-k", dest="smote_k", type=int, help="SMOTE neighbour count (default 5)")
    p.add_argument("--C", dest="C", type=float, help="inverse L2 strength for logistic regression (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reqsmote", description="Requirements classification experiments with SMOTE-Tomek.")
    parser.add_argument("--config", help="INI file with a [reqsmote] section")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="cross-validate models and report mean ± std metrics")
    _add_data_args(run)
    _add_experiment_args(run)
    run.add_argument("--models", help=f"comma list of {','.join(_models.SHORT_NAMES)} or 'all'")
    run.add_argument("--format", choices=["table", "json", "csv"])
    run.add_argument("--output", help="write the report here instead of stdout")
    run.add_argument("--fold-csv", dest="fold_csv", help="also write per-fold metrics CSV here")
    run.add_argument("--jobs", type=int, help="folds to run in parallel")

    tr = sub.add_parser("train", help="fit one model on the whole dataset and save it")
    _add_data_args(tr)
    _add_experiment_args(tr)
    tr.add_argument("--model", help="short model name (default lr)")
    tr.add_argument("--output", required=True, help="model JSON path")

    ins = sub.add_parser("inspect", help="top coefficient terms of a saved logistic regression")
    ins.add_argument("model_path", help="model JSON written by 'train'")
    ins.add_argument("--top", type=int)
    ins.add_argument("--show-resampled", dest="show_resampled", type=int,
                     help="print the terms of N random synthetic rows (needs --data)")
    _add_data_args(ins)
    ins.add_argument("--seed", type=int)

    dist = sub.add_parser("distribution", help="class counts and percentages")
    _add_data_args(dist)
    dist.add_argument("--format", choices=["table", "csv"])
    dist.add_argument("--output")
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            found = cp.read(args.config, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
        if not found:
            raise ConfigError(f"cannot read config file {args.config}")
        section = cp["reqsmote"] if cp.has_section("reqsmote") else {}
        for key, raw in section.items():
            key = key.replace("-", "_")
            try:
                if key in _INT_KEYS:
                    settings[key] = int(raw)
                elif key in _FLOAT_KEYS:
                    settings[key] = float(raw)
                else:
                    settings[key] = raw
            except ValueError:
                raise ConfigError(f"{args.config}: bad value {raw!r} for {key}") from None
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command"):
            settings[key] = val
    return settings


def _data_path(s: dict) -> Path:
    data_dir = os.environ.get(DATA_DIR_ENV)
    if not s.get("data"):
        if not data_dir:
            raise ConfigError(f"--data not given and ${DATA_DIR_ENV} is not set")
        return Path(data_dir) / DEFAULT_DATA_FILE
    path = Path(s["data"])
    if not path.exists() and not path.is_absolute() and data_dir and (Path(data_dir) / path).exists():
        return Path(data_dir) / path
    if not path.exists():
        raise ConfigError(f"data file {path} does not exist")
    return path


def _schema(s: dict):
    if not any(s.get(k) for k in ("text_col", "label_col", "id_col")):
        return s["schema"]
    base = CsvSchema() if s["schema"] == "canonical" else PROMISE_EXP_SCHEMA
    return CsvSchema(
        text_column=s["text_col"] or base.text_column,
        label_column=s["label_col"] or base.label_column,
        id_column=s["id_col"] or base.id_column,
        strip_quotes=base.strip_quotes,
    )


def _model_specs(names: str, C: float) -> list[_models.ModelSpec]:
    keys = list(_models.SHORT_NAMES) if names.strip() == "all" else [n.strip() for n in names.split(",") if n.strip()]
    specs = []
    for key in keys:
        if key not in _models.SHORT_NAMES:
            raise ConfigError(f"unknown model {key!r}; choose from {', '.join(_models.SHORT_NAMES)}")
        spec = _models.SHORT_NAMES[key]()
        if key == "lr":
            spec = _models.ModelSpec.logistic_regression(C=C)
        specs.append(spec)
    if not specs:
        raise ConfigError("no models selected")
    return specs


def _experiment(s: dict, specs) -> ExperimentConfig:
    if s["k"] < 2:
        raise ConfigError("K must be ≥ 2")
    if s["smote_k"] < 1:
        raise ConfigError("--smote-k must be ≥ 1")
    if s["resample"] not in ("none", "smote", "smote-tomek", "smote_tomek"):
        raise ConfigError(f"unknown resample mode {s['resample']!r}")
    return ExperimentConfig(
        models=specs,
        resample=s["resample"].replace("-", "_"),
        k=s["k"],
        seed=s["seed"],
        smote=SmoteParams(s["smote_k"], s["seed"]),
    )


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _aggregate_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", *(f"{m}_{stat}" for m in METRICS for stat in ("mean", "std")), "n_folds"])
    for name in report.model_names():
        agg = report.aggregates[name]
        w.writerow([name, *(repr(getattr(agg, stat)[m]) for m in METRICS for stat in ("mean", "std")),
                    agg.n_folds])
    return buf.getvalue()


def cmd_run(s: dict) -> int:
    specs = _model_specs(s["models"], s["C"])
    cfg = _experiment(s, specs)
    if s["jobs"] < 1:
        raise ConfigError("--jobs must be ≥ 1")
    if s["format"] not in ("table", "json", "csv"):
        raise ConfigError(f"unknown format {s['format']!r}")
    dataset = load_promise_csv(_data_path(s), _schema(s))
    report = run_cv(dataset, cfg, jobs=s["jobs"])
    if s["format"] == "json":
        text = report.to_json()
    elif s["format"] == "csv":
        text = _aggregate_csv(report)
    else:
        header = (f"# resample={cfg.resample} K={cfg.k} seed={cfg.seed} "
                  f"rows={len(dataset)} averaging=weighted\n")
        text = header + format_table([(n, report.aggregates[n]) for n in report.model_names()])
    _emit(text, s["output"])
    if s["fold_csv"]:
        Path(s["fold_csv"]).write_text(report.fold_csv(), encoding="utf-8")
    return 0


def cmd_train(s: dict) -> int:
    specs = _model_specs(s["model"], s["C"])
    if len(specs) != 1:
        raise ConfigError("train takes exactly one --model")
    cfg = _experiment(s, specs)
    dataset = load_promise_csv(_data_path(s), _schema(s))
    model = train_final(dataset, cfg, specs[0])
    _models.save(model, s["output"])
    print(f"saved {specs[0].name} ({len(model.classes)} classes, {model.n_features} features) to {s['output']}")
    return 0


def cmd_inspect(s: dict) -> int:
    path = Path(s["model_path"])
    if not path.exists():
        raise ConfigError(f"model file {path} does not exist")
    try:
        model = _models.load(path)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{path} is not a saved model: {exc}") from None
    if model.kind != "logistic_regression":
        raise ConfigError(f"inspect needs a logistic regression model, got {model.spec.name}")
    out = []
    for cls, terms in _models.top_features(model, n=s["top"]).items():
        name = LABEL_NAMES.get(Label(cls), cls)
        out.append(f"{name} ({cls})")
        out += [f"  {term:<24s} {weight:+.4f}" for term, weight in terms]
    n_show = s["show_resampled"]
    if n_show:
        if n_show < 0:
            raise ConfigError("--show-resampled must be ≥ 0")
        dataset = load_promise_csv(_data_path(s), _schema(s))
        X = _vec.transform(model.vocabulary, dataset)
        params = SmoteParams(model.info.get("smote_k_neighbors", 5), model.info.get("smote_seed", 42))
        balanced, _ = resample(X, model.info.get("resample_mode", "smote_tomek"), params)
        synth = np.flatnonzero(balanced.is_synthetic)
        if len(synth) == 0:
            raise ConfigError("the model was trained without oversampling; no synthetic rows to show")
        rng = np.random.default_rng(s["seed"])
        out.append("")
        out.append("Resampled representations")
        for r in np.sort(rng.choice(synth, size=min(n_show, len(synth)), replace=False)):
            lab = Label(balanced.labels[r])
            terms = ", ".join(_vec.nonzero_terms(model.vocabulary, balanced.rows[r]))
            out.append(f"{terms}\t{LABEL_NAMES[lab]} ({lab.value})")
    print("\n".join(out))
    return 0


def cmd_distribution(s: dict) -> int:
    fmt = s["format"]
    if fmt not in ("table", "csv"):
        raise ConfigError("distribution supports --format table or csv")
    dataset = load_promise_csv(_data_path(s), _schema(s))
    dist = class_distribution(dataset)
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "count"])
        for lab, n in dist.items():
            w.writerow([lab.value, n])
    else:
        for lab, n, pct in distribution_table(dist):
            buf.write(f"{lab.value:<3s} {n:>5d} ({pct:.1f}%)  {LABEL_NAMES[lab]}\n")
        buf.write(f"total {len(dataset)}\n")
    _emit(buf.getvalue(), s.get("output"))
    return 0


COMMANDS = {"run": cmd_run, "train": cmd_train, "inspect": cmd_inspect, "distribution": cmd_distribution}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = _resolve(args)
        return COMMANDS[args.command](settings)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except ReqSmoteError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

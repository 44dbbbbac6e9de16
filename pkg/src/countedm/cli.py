"""Command-line interface: stats, fit, compare, pmf, measure, validate.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Output formats: plain text table, RFC-4180 CSV, or JSON with a config echo.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from . import edm, fitting, gof, lagrange
from .baselines import MODELS, BaselineSpec, baseline_pmf
from .edm import ABM, LM, ModelSpec
from .errors import (CountEdmError, DuplicateValue, EmptyData,
                     MeanOutOfDomain, MeasureOverflow, NegativeCount,
                     NoInteriorMaximum, NonConvergence, ParseError,
                     Underdispersed, UnboundedMeasure)
from .fitting import FrequencyTable, fit_baseline, fit_mle, fit_moments

__all__ = ["RunConfig", "ingest", "bundled_data_path", "cmd_stats", "cmd_fit",
           "cmd_compare", "cmd_pmf", "cmd_measure", "cmd_validate", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_DATA_ERRORS = (ParseError, DuplicateValue, NegativeCount, EmptyData, FileNotFoundError)
_NUMERIC_ERRORS = (MeasureOverflow, UnboundedMeasure, NonConvergence,
                   NoInteriorMaximum, Underdispersed, MeanOutOfDomain)


@dataclass
class RunConfig:
    """Parsed invocation; numeric flags validated by the argument parser."""

    command: str
    data_path: str | None = None
    family: str | None = None
    r: int | None = None
    p: float | None = None
    m: float | None = None
    r_range: tuple[int, int] = (1, 10)
    models: tuple[str, ...] = ()
    pool_threshold: float = 1.0
    n_max: int | None = None
    output_format: str = "table"
    method: str = "mle"
    inject_error: str | None = None


def bundled_data_path() -> str:
    """Path of the packaged Zaire 1974 insurance-claims frequency table."""
    return str(resources.files("countedm").joinpath("data/zaire_1974.csv"))


def ingest(path: str) -> FrequencyTable:
    """Read a `value,frequency` CSV into a FrequencyTable.

    Tolerates surrounding whitespace; rejects duplicate values, negative
    numbers and non-integer fields, reporting the offending line number.
    """
    pairs: list[tuple[int, int]] = []
    seen: set[int] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            cells = [c.strip() for c in row]
            if header is None:
                if [c.lower() for c in cells[:2]] != ["value", "frequency"]:
                    raise ParseError("expected header 'value,frequency'", lineno)
                header = cells
                continue
            if len(cells) < 2:
                raise ParseError("need two columns: value,frequency", lineno)
            try:
                v, c = int(cells[0]), int(cells[1])
            except ValueError:
                raise ParseError(f"non-integer entry {row!r}", lineno) from None
            if v < 0 or c < 0:
                raise NegativeCount(f"negative entry {row!r}", lineno)
            if v in seen:
                raise DuplicateValue(f"value {v} listed twice", lineno)
            seen.add(v)
            pairs.append((v, c))
    if header is None:
        raise ParseError("empty file", 1)
    if not pairs:
        raise EmptyData("no data rows")
    return FrequencyTable.from_pairs(pairs)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        if x == 0 or 1e-4 <= abs(x) < 1e7:
            return f"{x:.6f}"
        return f"{x:.6e}"
    return str(x)


def _emit_table(headers: list[str], rows: list[list], out) -> None:
    str_rows = [[_fmt(x) for x in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in str_rows)) if str_rows else len(h)
              for i, h in enumerate(headers)]
    out.write("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip() + "\n")
    for r in str_rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _emit_csv(headers: list[str], rows: list[list], out) -> None:
    # repr round-trips floats exactly; csv mode is the machine-readable surface
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(headers)
    for r in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in r])


def _emit(cfg: RunConfig, headers: list[str], rows: list[list], out,
          json_payload=None) -> None:
    if cfg.output_format == "csv":
        _emit_csv(headers, rows, out)
    elif cfg.output_format == "json":
        payload = json_payload if json_payload is not None else {
            "columns": headers,
            "rows": [[x for x in row] for row in rows],
        }
        json.dump({"config": _config_echo(cfg), "result": payload}, out,
                  indent=2, sort_keys=True)
        out.write("\n")
    else:
        _emit_table(headers, rows, out)


def _config_echo(cfg: RunConfig) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v)
            for k, v in vars(cfg).items() if v is not None}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_stats(cfg: RunConfig, out=sys.stdout) -> int:
    data = ingest(cfg.data_path)
    st = gof.descriptive(data)
    rows = [["n_obs", st.n_obs], ["mean", st.mean], ["variance", st.variance],
            ["skewness", st.skewness], ["kurtosis", st.kurtosis],
            ["fraction_zeros", st.fraction_zeros],
            ["dispersion_index", st.dispersion_index]]
    _emit(cfg, ["statistic", "value"], rows, out,
          json_payload={r[0]: r[1] for r in rows})
    return EXIT_OK


def _fit_one(cfg: RunConfig, data: FrequencyTable):
    if cfg.family is not None:
        if cfg.r is None:
            raise ValueError("--r is required with --family")
        if cfg.method == "moments":
            return fit_moments(cfg.family, cfg.r, data)
        return fit_mle(cfg.family, cfg.r, data)
    if len(cfg.models) != 1:
        raise ValueError("fit needs either --family/--r or exactly one --models entry")
    return fit_baseline(cfg.models[0], data)


def _result_row(data: FrequencyTable, name: str, fr: fitting.FitResult,
                pool_threshold: float, n_max: int | None):
    if isinstance(fr.spec, ModelSpec):
        dist = edm.pmf(fr.spec, fr.m_hat, n_max=n_max)
        probs = dist.probs
        params = {"p": fr.spec.p, "m": fr.m_hat}
    else:
        probs = baseline_pmf(fr.spec, n_max if n_max is not None else data.max_value + 40)
        params = dict(fr.spec.params)
    report = gof.gof_report(data, probs, n_params=2, min_expected=pool_threshold)
    return report, params


def cmd_fit(cfg: RunConfig, out=sys.stdout) -> int:
    data = ingest(cfg.data_path)
    fr = _fit_one(cfg, data)
    if isinstance(fr.spec, ModelSpec):
        name = f"{fr.spec.family}(r={fr.spec.r})"
        params = {"m": fr.m_hat, "p": fr.spec.p}
    else:
        name = fr.spec.model
        params = dict(fr.spec.params)
    rows = [["model", name], ["method", fr.method],
            ["log_likelihood", fr.log_likelihood], ["iterations", fr.iterations]]
    rows += [[f"param_{k}", v] for k, v in params.items()]
    _emit(cfg, ["field", "value"], rows, out,
          json_payload={"model": name, "method": fr.method,
                        "log_likelihood": fr.log_likelihood,
                        "iterations": fr.iterations, "params": params})
    return EXIT_OK


def cmd_compare(cfg: RunConfig, out=sys.stdout) -> int:
    """Fit the requested models and report one goodness-of-fit row per model."""
    data = ingest(cfg.data_path)
    headers = ["model", "family", "r", "chi2", "df", "p_value", "rmse", "kl",
               "log_likelihood", "params"]
    rows: list[list] = []
    blocks = []
    lo, hi = cfg.r_range
    for family in (ABM, LM):
        for r in range(lo, hi + 1):
            label = f"{family}(r={r})"
            try:
                fr = (fit_moments(family, r, data) if cfg.method == "moments"
                      else fit_mle(family, r, data))
                report, params = _result_row(data, label, fr, cfg.pool_threshold,
                                             cfg.n_max)
            except CountEdmError as exc:
                rows.append([label, family, r, "", "", "", "", "", "",
                             f"failed: {exc}"])
                continue
            pstr = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
            rows.append([label, family, r, report.chi2, report.df, report.p_value,
                         report.rmse, report.kl, fr.log_likelihood, pstr])
            blocks.append({"model": label, "family": family, "r": r,
                           "params": params, "log_likelihood": fr.log_likelihood,
                           "gof": {"chi2": report.chi2, "df": report.df,
                                   "p_value": report.p_value, "rmse": report.rmse,
                                   "kl": report.kl}})
    for model in cfg.models:
        try:
            fr = fit_baseline(model, data)
            report, params = _result_row(data, model, fr, cfg.pool_threshold,
                                         cfg.n_max)
        except CountEdmError as exc:
            rows.append([model, "", "", "", "", "", "", "", "", f"failed: {exc}"])
            continue
        pstr = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
        rows.append([model, "", "", report.chi2, report.df, report.p_value,
                     report.rmse, report.kl, fr.log_likelihood, pstr])
        blocks.append({"model": model, "params": params,
                       "log_likelihood": fr.log_likelihood,
                       "gof": {"chi2": report.chi2, "df": report.df,
                               "p_value": report.p_value, "rmse": report.rmse,
                               "kl": report.kl}})
    _emit(cfg, headers, rows, out, json_payload={"models": blocks})
    return EXIT_OK


def cmd_pmf(cfg: RunConfig, out=sys.stdout) -> int:
    spec = ModelSpec(cfg.family, cfg.r, cfg.p)
    dist = edm.pmf(spec, cfg.m, n_max=cfg.n_max)
    rows = [[n, float(dist.probs[n]), float(dist.log_pmf[n])]
            for n in range(dist.n_max + 1)]
    _emit(cfg, ["n", "pmf", "log_pmf"], rows, out)
    return EXIT_OK


def cmd_measure(cfg: RunConfig, out=sys.stdout) -> int:
    spec = ModelSpec(cfg.family, cfg.r, cfg.p)
    n_max = cfg.n_max if cfg.n_max is not None else 20
    meas = edm.generating_measure(spec, n_max)
    rows = [[n, float(meas.log_scaled[n]),
             float(meas.log_scaled[n] + n * math.log(spec.p))]
            for n in range(n_max + 1)]
    _emit(cfg, ["n", "log_scaled", "log_raw"], rows, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate: cross-module oracle suite
# ---------------------------------------------------------------------------

def _validation_checks():
    """Yield (module, name, max_deviation, tolerance) for the oracle suite."""
    # Lagrange-inversion measure vs coefficient-extraction measure (LM class)
    for r in (1, 2):
        nu = lagrange.nu_measure(r, 15)
        for p in (0.5, 1.0, 2.0):
            mu_conv = lagrange.conv_exponential(nu, p, 15)
            meas = edm.generating_measure(ModelSpec(LM, r, p), 15)
            mu_ce = np.exp(meas.log_scaled + np.arange(16) * math.log(p))
            dev = float(np.max(np.abs(mu_conv / mu_ce - 1.0)))
            yield ("lagrange", f"conv-exponential vs series measure (r={r}, p={p})",
                   dev, 1e-9)
    # closed form nu(n) = n^(n-2)/n! for r=1
    nu = lagrange.nu_measure(1, 15)
    ref = np.array([math.exp((n - 2) * math.log(n) - math.lgamma(n + 1))
                    for n in range(1, 16)])
    yield ("lagrange", "nu closed form (r=1)",
           float(np.max(np.abs(nu.values / ref - 1.0))), 1e-12)
    # Hermite closed form for r=2
    nu2 = lagrange.nu_measure(2, 12)
    herm = np.array([lagrange.hermite_nu(n) for n in range(1, 13)])
    yield ("lagrange", "Hermite closed form (r=2)",
           float(np.max(np.abs(nu2.values / herm - 1.0))), 1e-10)
    # bounded ABM total mass vs e^(p/(r-1))
    for r, p in ((2, 0.5), (2, 1.0), (3, 1.0)):
        got = edm.total_mass(ModelSpec(ABM, r, p))
        want = math.exp(p / (r - 1))
        yield ("edm", f"total mass (r={r}, p={p})", abs(got / want - 1.0), 1e-3)
    # normalization sweep
    for family in (ABM, LM):
        for r in (0, 1, 3):
            spec = ModelSpec(family, r, 1.0)
            dist = edm.pmf(spec, 0.2)
            yield ("edm", f"pmf normalization ({family}, r={r})",
                   abs(float(dist.probs.sum()) - 1.0), 1e-8)
    # Poisson reduction
    spec = ModelSpec(ABM, 0, 1.0)
    dist = edm.pmf(spec, 0.5, n_max=20)
    ref = np.exp(-0.5 + np.arange(21) * math.log(0.5)
                 - np.array([math.lgamma(n + 1) for n in range(21)]))
    yield ("edm", "Poisson reduction (r=0)",
           float(np.max(np.abs(dist.probs - ref))), 1e-12)


def cmd_validate(cfg: RunConfig, out=sys.stdout) -> int:
    failures = 0
    for module, name, dev, tol in _validation_checks():
        if cfg.inject_error == module:
            dev = dev + 10.0 * tol  # test hook: force a visible failure
        ok = dev <= tol
        failures += 0 if ok else 1
        out.write(f"[{'PASS' if ok else 'FAIL'}] {module}: {name}: "
                  f"max deviation {dev:.3e} (tol {tol:.0e})\n")
    out.write(f"{'all checks passed' if failures == 0 else f'{failures} checks FAILED'}\n")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parse_r_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected A..B with integers") from None
    if not (0 <= lo <= hi):
        raise argparse.ArgumentTypeError("need 0 <= A <= B")
    return lo, hi


def _parse_models(text: str) -> tuple[str, ...]:
    models = tuple(t.strip().lower() for t in text.split(",") if t.strip())
    for m in models:
        if m not in MODELS:
            raise argparse.ArgumentTypeError(f"unknown model {m!r}; choose from {MODELS}")
    return models


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countedm",
        description="Count-data EDM families (ABM/LM): fitting, comparison and "
                    "validation tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, data=False):
        if data:
            sp.add_argument("--data", dest="data_path", default=None,
                            help="CSV file with header value,frequency "
                                 "(default: bundled Zaire 1974 claims data)")
        sp.add_argument("--format", dest="output_format", default="table",
                        choices=("table", "csv", "json"))

    sp = sub.add_parser("stats", help="descriptive statistics of a data set")
    add_common(sp, data=True)

    sp = sub.add_parser("fit", help="fit one model")
    add_common(sp, data=True)
    sp.add_argument("--family", choices=(ABM, LM))
    sp.add_argument("--r", type=int)
    sp.add_argument("--models", type=_parse_models, default=())
    sp.add_argument("--method", choices=("mle", "moments"), default="mle")

    sp = sub.add_parser("compare", help="fit families over an r range plus baselines")
    add_common(sp, data=True)
    sp.add_argument("--r-range", dest="r_range", type=_parse_r_range, default=(1, 10))
    sp.add_argument("--models", type=_parse_models, default=())
    sp.add_argument("--pool-threshold", dest="pool_threshold", type=float, default=1.0)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)
    sp.add_argument("--method", choices=("mle", "moments"), default="mle")

    sp = sub.add_parser("pmf", help="probability mass function of one member")
    add_common(sp)
    sp.add_argument("--family", choices=(ABM, LM), required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)

    sp = sub.add_parser("measure", help="generating-measure entries of one member")
    add_common(sp)
    sp.add_argument("--family", choices=(ABM, LM), required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n-max", dest="n_max", type=int, default=20)

    sp = sub.add_parser("validate", help="run the cross-module oracle suite")
    add_common(sp)
    sp.add_argument("--inject-error", dest="inject_error", default=None,
                    help="test hook: force a failure in the named module")
    return parser


_COMMANDS = {
    "stats": cmd_stats,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "pmf": cmd_pmf,
    "measure": cmd_measure,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(command=ns.command)
    for key, value in vars(ns).items():
        if key != "command" and hasattr(cfg, key):
            setattr(cfg, key, value)
    if getattr(ns, "data_path", None) is None and cfg.command in ("stats", "fit",
                                                                  "compare"):
        cfg.data_path = bundled_data_path()
    try:
        return _COMMANDS[cfg.command](cfg, out)
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, CountEdmError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

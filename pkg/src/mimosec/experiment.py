"""
Experiment plumbing: parameter sweeps, mode tables, figure data and CSV
output.

Every producer returns a ``Table`` (named columns, rows as dicts, ``#``
comment lines, list of failed cells).  Rows are generated in grid order
and a failed cell is kept as a row with an empty result and a ``status``
message, so partial output survives a numerical failure.

CSV format: UTF-8, LF line endings, ``#`` comments first, then a header
row and one record per grid point.  Floats are written with 12
significant digits using ``format(x, ".12g")``, which does not depend on
the locale.
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import math
from dataclasses import dataclass, field

from .asymptotics import detect_regime
from .config import SystemConfig, db_to_linear
from .errors import NumericalInstabilityError, QuadratureError, SolverError
from .modeselect import STRATEGIES, ams_select, fixed_mode
from .montecarlo import SCHEDULERS, run_trials

NUMERICAL_ERRORS = (NumericalInstabilityError, QuadratureError, SolverError)

TABLE_TSNR_DB = tuple(range(-10, 11, 2))
FIGURE_TSNR_DB = tuple(range(-10, 21, 2))
BASE = SystemConfig(n_antennas=4, n_users=10, mode=1, snr=1.0, alpha2=0.01, eps=0.05)
DELTA_R = 0.01
# mode pairs closer than this (b/s/Hz) are reported as near-ties
NEAR_TIE = 0.05

# Published mode sequences over TABLE_TSNR_DB.
REFERENCE_MODES = {
    "table1": {
        "AMS": (4, 4, 3, 3, 3, 2, 2, 2, 2, 1, 1),
        "FTM1": (1,) * 11,
        "FTM2": (4,) * 11,
    },
    "table2": {
        0.10: (4, 4, 4, 4, 3, 3, 2, 2, 2, 2, 1),
        0.05: (4, 4, 3, 3, 3, 2, 2, 2, 2, 1, 1),
        0.01: (1,) * 11,
    },
    "table3": {
        50: (4, 4, 4, 4, 3, 2, 2, 2, 2, 2, 2),
        20: (4, 4, 4, 4, 3, 2, 2, 2, 2, 2, 1),
        5: (4, 4, 4, 3, 2, 2, 2, 1, 1, 1, 1),
    },
}
TABLES = tuple(REFERENCE_MODES)
FIGURES = ("fig2", "fig3", "fig4", "fig5")
TARGETS = TABLES + FIGURES

# sweepable names -> SystemConfig field ("tsnr_db" is converted to snr)
SWEEP_PARAMS = {
    "nt": "n_antennas", "n_antennas": "n_antennas",
    "k": "n_users", "n_users": "n_users",
    "m": "mode", "mode": "mode",
    "alpha2": "alpha2",
    "eps": "eps",
    "rho": "snr", "snr": "snr",
    "tsnr_db": "tsnr_db",
}
SCHEMES = ("AMS", "FTM1", "FTM2")


def version():
    from . import __version__
    return __version__


# ---------------------------------------------------------------------------
# tables and CSV
# ---------------------------------------------------------------------------

def format_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


@dataclass
class Table:
    name: str
    columns: tuple
    rows: list = field(default_factory=list)
    comments: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def column(self, name):
        return [r.get(name) for r in self.rows]

    def write_csv(self, fh):
        for c in self.comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_value(r.get(c)) for c in self.columns])

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def provenance(name, params, seed=None):
    lines = [f"mimosec {version()} {name}"]
    lines.append("parameters: " + " ".join(f"{k}={format_value(v)}" for k, v in params.items()))
    if seed is not None:
        lines.append(f"seed: {seed}")
    return lines


def cfg_params(cfg):
    return {
        "nt": cfg.n_antennas,
        "k": cfg.n_users,
        "alpha2": cfg.alpha2,
        "eps": cfg.eps,
        "rho": cfg.snr,
    }


def tsnr_of(cfg):
    return 10.0 * math.log10(cfg.snr)


def _record_failure(table, row, key, cfg, exc):
    msg = f"numerical failure in the {detect_regime(cfg).value} regime: {exc}"
    row["status"] = f"failed: {msg}"
    table.failures.append((*key, msg))


# ---------------------------------------------------------------------------
# mode tables
# ---------------------------------------------------------------------------

def _table_rows(target):
    """(row label, SystemConfig for the row, schemes) for a table target."""
    if target == "table1":
        return [("AMS", BASE, "AMS"), ("FTM1", BASE, "FTM1"), ("FTM2", BASE, "FTM2")]
    if target == "table2":
        return [(e, BASE.replace(eps=e), "AMS") for e in REFERENCE_MODES["table2"]]
    if target == "table3":
        return [(k, BASE.replace(n_users=k), "AMS") for k in REFERENCE_MODES["table3"]]
    raise ValueError(f"unknown table {target!r}; choose from {TABLES}")


def row_match_summary(rows, near_tie=NEAR_TIE):
    """Match statistics for one row of a mode table.

    Returns (matches, cells, all mismatches near-tied).
    """
    n = len(rows)
    hits = sum(1 for r in rows if r["match"])
    tied = all(r["match"] or (r["margin"] is not None and r["margin"] < near_tie) for r in rows)
    return hits, n, tied


def row_passes(rows, near_tie=NEAR_TIE, min_matches=None):
    hits, n, tied = row_match_summary(rows, near_tie)
    need = n - 1 if min_matches is None else min_matches
    return hits >= need and tied


def mode_table(target, strategy="paper_scan", delta_r=DELTA_R, method="auto", tsnr_db=TABLE_TSNR_DB):
    """Selected modes over the table's TSNR grid, one record per cell.

    ``margin`` is the chosen mode's sum capacity minus the runner-up's;
    ``near_tie`` flags margins below NEAR_TIE.  FTM rows carry the margin of
    the AMS decision at the same point, since that is what decides whether
    the fixed mode is competitive.
    """
    ref = REFERENCE_MODES[target]
    cols = ("row", "tsnr_db", "mode", "reference_mode", "match", "sum_capacity",
            "runner_up", "runner_up_sum_capacity", "margin", "near_tie", "status")
    table = Table(target, cols)
    cache = {}
    for label, cfg0, scheme in _table_rows(target):
        for j, db in enumerate(tsnr_db):
            cfg = cfg0.replace(snr=db_to_linear(db))
            want = ref[label][j] if len(tsnr_db) == len(ref[label]) and tuple(tsnr_db) == TABLE_TSNR_DB else None
            row = {"row": label, "tsnr_db": float(db), "reference_mode": want}
            try:
                key = (cfg0, db)
                if key not in cache:
                    cache[key] = ams_select(cfg, strategy, delta_r, method)
                d = cache[key]
                if scheme == "AMS":
                    mode = d.chosen
                else:
                    mode = 1 if scheme == "FTM1" else cfg.n_antennas
                    if mode in d.failures:
                        raise d.failures[mode]
                row.update(
                    mode=mode,
                    sum_capacity=d.per_mode_sum_capacity[mode],
                    runner_up=d.runner_up,
                    runner_up_sum_capacity=d.per_mode_sum_capacity.get(d.runner_up),
                    margin=d.margin,
                    near_tie=d.margin < NEAR_TIE,
                    status="ok" if not d.failures else "partial: modes " + ",".join(map(str, d.failures)),
                )
            except NUMERICAL_ERRORS as exc:
                _record_failure(table, row, (label, db), cfg, exc)
            row["match"] = want is not None and row.get("mode") == want
            table.rows.append(row)
    params = {**cfg_params(BASE), "delta_r": delta_r, "strategy": strategy, "method": method}
    params.pop("rho")
    table.comments = provenance(f"reproduce {target}", params)
    table.comments.append(f"near-tie threshold: {NEAR_TIE} b/s/Hz")
    for label in ref:
        rows = [r for r in table.rows if r["row"] == label]
        hits, n, tied = row_match_summary(rows)
        table.comments.append(
            f"row {label}: {hits}/{n} cells match the reference; mismatches all near-tied: {'yes' if tied else 'no'}"
        )
    return table


def table_rows_by_label(table):
    out = {}
    for r in table.rows:
        out.setdefault(r["row"], []).append(r)
    return out


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def _capacity_curve(table, label_col, label, cfg0, scheme, tsnr_db, strategy, delta_r, method):
    for db in tsnr_db:
        cfg = cfg0.replace(snr=db_to_linear(db))
        row = {label_col: label, "tsnr_db": float(db), "scheme": scheme}
        try:
            if scheme == "AMS":
                d = ams_select(cfg, strategy, delta_r, method)
            else:
                d = fixed_mode(cfg, scheme, strategy, delta_r, method)
            row.update(mode=d.chosen, rate=d.per_mode_rate[d.chosen], sum_capacity=d.sum_capacity, status="ok")
        except NUMERICAL_ERRORS as exc:
            _record_failure(table, row, (label, db), cfg, exc)
        table.rows.append(row)


def figure_data(target, tsnr_db=FIGURE_TSNR_DB, strategy="paper_scan", delta_r=DELTA_R, method="auto",
                trials=200_000, seed=0, scheduling="all_users", workers=1):
    """Curve data for the sum-capacity figures.

    fig2  AMS, FTM1 and FTM2 under the base configuration
    fig3  AMS for eps in {0.10, 0.05, 0.01}
    fig4  AMS for K in {50, 20, 5}
    fig5  AMS theory vs Monte Carlo for alpha in {0.01, 0.10}
    """
    cols = ("curve", "tsnr_db", "scheme", "mode", "rate", "sum_capacity", "status")
    params = {**cfg_params(BASE), "delta_r": delta_r, "strategy": strategy, "method": method}
    params.pop("rho")
    if target == "fig2":
        table = Table(target, cols)
        for s in SCHEMES:
            _capacity_curve(table, "curve", s, BASE, s, tsnr_db, strategy, delta_r, method)
    elif target == "fig3":
        table = Table(target, ("eps",) + cols[1:])
        for e in (0.10, 0.05, 0.01):
            _capacity_curve(table, "eps", e, BASE.replace(eps=e), "AMS", tsnr_db, strategy, delta_r, method)
    elif target == "fig4":
        table = Table(target, ("k",) + cols[1:])
        for k in (50, 20, 5):
            _capacity_curve(table, "k", k, BASE.replace(n_users=k), "AMS", tsnr_db, strategy, delta_r, method)
    elif target == "fig5":
        table = simulation_figure(tsnr_db, method, trials, seed, scheduling, workers)
        params = {**cfg_params(BASE), "method": method, "trials": trials, "scheduling": scheduling}
        params.pop("rho")
        params.pop("alpha2")
    else:
        raise ValueError(f"unknown figure {target!r}; choose from {FIGURES}")
    table.comments = provenance(f"reproduce {target}", params, seed if target == "fig5" else None) + table.comments
    return table


def simulation_figure(tsnr_db=FIGURE_TSNR_DB, method="auto", trials=200_000, seed=0, scheduling="all_users",
                      workers=1, alphas=(0.01, 0.10)):
    """Theory vs simulation of the AMS sum capacity.

    The theoretical per-beam capacity comes from exact inversion
    (bisection) so that the empirical outage at that rate is directly
    comparable with eps.  The simulated capacity is M times the empirical
    eps-quantile of the per-beam secrecy gap.
    """
    cols = ("alpha", "alpha2", "tsnr_db", "mode", "rate", "sum_capacity", "empirical_outage",
            "outage_std_err", "sim_rate", "sim_sum_capacity", "status")
    table = Table("fig5", cols)
    for a in alphas:
        base = BASE.replace(alpha2=a * a)
        for db in tsnr_db:
            cfg = base.replace(snr=db_to_linear(db))
            row = {"alpha": a, "alpha2": a * a, "tsnr_db": float(db)}
            try:
                d = ams_select(cfg, "bisection", method=method)
                m = d.chosen
                r = d.per_mode_rate[m]
                row.update(mode=m, rate=r, sum_capacity=d.sum_capacity)
                if trials > 0:
                    st = run_trials(cfg.with_mode(m), trials, [r], rng_seed=seed, scheduling=scheduling,
                                    workers=workers, quantile_levels=(cfg.eps,))
                    q = max(st.quantiles[cfg.eps], 0.0)
                    row.update(empirical_outage=st.empirical_outage[0], outage_std_err=st.outage_std_err[0],
                               sim_rate=q, sim_sum_capacity=m * q)
                row["status"] = "ok"
            except NUMERICAL_ERRORS as exc:
                _record_failure(table, row, (a, db), cfg, exc)
            table.rows.append(row)
    return table


def reproduce(target, **kw):
    if target in TABLES:
        allowed = {"strategy", "delta_r", "method"}
        return mode_table(target, **{k: v for k, v in kw.items() if k in allowed})
    if target in FIGURES:
        return figure_data(target, **kw)
    raise ValueError(f"unknown target {target!r}; choose from {TARGETS}")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    """A named sweep over SystemConfig parameters.

    ``sweep`` is a sequence of (parameter, values) pairs expanded as a
    Cartesian product in the given order (last parameter varies fastest).
    ``trials = 0`` means analytic results only.
    """

    name: str = "sweep"
    base: SystemConfig = BASE
    sweep: tuple = ()
    schemes: tuple = SCHEMES
    trials: int = 0
    seed: int = 0
    outputs: tuple = ()
    strategy: str = "paper_scan"
    delta_r: float = DELTA_R
    method: str = "auto"
    scheduling: str = "all_users"
    workers: int = 1

    def __post_init__(self):
        for p, values in self.sweep:
            if p not in SWEEP_PARAMS:
                raise ValueError(f"cannot sweep {p!r}; choose from {sorted(SWEEP_PARAMS)}")
            if len(values) == 0:
                raise ValueError(f"sweep over {p!r} has no values")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; choose from {SCHEMES}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if not self.delta_r > 0:
            raise ValueError("delta_r must be > 0")
        if self.scheduling not in SCHEDULERS:
            raise ValueError(f"scheduling must be one of {SCHEDULERS}")

    def points(self):
        """SystemConfig for every grid point, in output order."""
        names = [p for p, _ in self.sweep]
        for combo in itertools.product(*(v for _, v in self.sweep)):
            changes = {}
            for p, v in zip(names, combo):
                f = SWEEP_PARAMS[p]
                if f == "tsnr_db":
                    changes["snr"] = db_to_linear(float(v))
                else:
                    changes[f] = v
            cfg = self.base.replace(**changes)
            if cfg.mode > cfg.n_antennas:
                cfg = cfg.with_mode(cfg.n_antennas)
            yield cfg


def run_sweep(spec: ExperimentSpec) -> Table:
    cols = ["nt", "k", "alpha2", "eps", "tsnr_db", "rho", "scheme", "mode", "rate", "sum_capacity", "margin"]
    if spec.trials > 0:
        cols += ["empirical_outage", "outage_std_err", "empirical_interception"]
    cols.append("status")
    table = Table(spec.name, tuple(cols))
    for cfg in spec.points():
        ams = None
        for scheme in spec.schemes:
            row = {"nt": cfg.n_antennas, "k": cfg.n_users, "alpha2": cfg.alpha2, "eps": cfg.eps,
                   "tsnr_db": tsnr_of(cfg), "rho": cfg.snr, "scheme": scheme}
            try:
                if scheme == "AMS":
                    d = ams = ams_select(cfg, spec.strategy, spec.delta_r, spec.method)
                else:
                    d = fixed_mode(cfg, scheme, spec.strategy, spec.delta_r, spec.method)
                m = d.chosen
                row.update(mode=m, rate=d.per_mode_rate[m], sum_capacity=d.sum_capacity,
                           margin=d.margin if d is ams else None)
                if spec.trials > 0:
                    st = run_trials(cfg.with_mode(m), spec.trials, [d.per_mode_rate[m]], rng_seed=spec.seed,
                                    scheduling=spec.scheduling, workers=spec.workers)
                    row.update(empirical_outage=st.empirical_outage[0], outage_std_err=st.outage_std_err[0],
                               empirical_interception=st.empirical_interception)
                row["status"] = "ok"
            except NUMERICAL_ERRORS as exc:
                _record_failure(table, row, (scheme, tsnr_of(cfg)), cfg, exc)
            table.rows.append(row)
    params = {**cfg_params(spec.base), "mode": spec.base.mode, "strategy": spec.strategy, "delta_r": spec.delta_r,
              "method": spec.method}
    if spec.trials:
        params.update(trials=spec.trials, scheduling=spec.scheduling)
    table.comments = provenance(f"sweep {spec.name}", params, spec.seed if spec.trials else None)
    table.comments.append("sweep: " + "; ".join(f"{p}={','.join(format_value(v) for v in vs)}"
                                                 for p, vs in spec.sweep))
    return table


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------

_INT_KEYS = {"nt", "k", "m", "trials", "seed", "workers"}
_FLOAT_KEYS = {"alpha2", "eps", "rho", "tsnr_db", "delta_r", "r"}


def _parse_scalar(key, text):
    if key in _INT_KEYS:
        return int(text)
    if key in _FLOAT_KEYS:
        return float(text)
    return text.strip()


def parse_values(key, text):
    """Comma-separated list or ``start:stop:step`` range (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] == 0:
            raise ValueError(f"range for {key!r} must be start:stop:step with step != 0")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + i * step for i in range(max(n, 0))]
        if SWEEP_PARAMS.get(key) in ("n_antennas", "n_users", "mode"):
            return tuple(int(round(v)) for v in vals)
        return tuple(round(v, 12) for v in vals)
    field_name = SWEEP_PARAMS.get(key, key)
    conv = int if field_name in ("n_antennas", "n_users", "mode") else float
    return tuple(conv(p) for p in text.split(",") if p.strip())


def load_config(path):
    """Read an INI experiment file.

    Sections (all optional)::

        [experiment]   name, schemes, trials, seed, outputs, strategy,
                       delta_r, method, scheduling, workers
        [system]       nt, k, m, alpha2, eps, and tsnr_db or rho
        [sweep]        parameter = v1, v2, ...   or   start:stop:step

    Returns a flat dict of flag-style keys plus ``sweep`` (list of pairs).
    """
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    out = {}
    for section in ("experiment", "system"):
        if cp.has_section(section):
            for key, text in cp.items(section):
                key = key.replace("-", "_")
                if key in ("schemes", "outputs"):
                    out[key] = tuple(s.strip() for s in text.split(",") if s.strip())
                else:
                    out[key] = _parse_scalar(key, text)
    if cp.has_section("sweep"):
        out["sweep"] = [(k, parse_values(k, v)) for k, v in cp.items("sweep")]
    for s in cp.sections():
        if s not in ("experiment", "system", "sweep"):
            raise ValueError(f"unknown section [{s}] in {path}")
    return out


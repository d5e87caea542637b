"""
Command-line front end.

    python3 -m mimosec analytic {outage,capacity,interception,asymptotic} [flags]
    python3 -m mimosec simulate --seed S [flags]
    python3 -m mimosec select {ams,ftm1,ftm2} [flags]
    python3 -m mimosec sweep --sweep tsnr_db=-10:10:2 [flags]
    python3 -m mimosec reproduce {table1,table2,table3,fig2,fig3,fig4,fig5}

Transmit SNR is given in dB (--tsnr-db) or linear (--rho); everything
past this module is linear.  Values from --config are used where the
corresponding flag is absent.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import asymptotics as asy
from .analytic import interception_probability, outage_probability, secrecy_outage_capacity
from .config import Regime, SystemConfig, db_to_linear
from .experiment import (
    FIGURE_TSNR_DB,
    NUMERICAL_ERRORS,
    SCHEMES,
    SWEEP_PARAMS,
    TARGETS,
    ExperimentSpec,
    Table,
    format_value,
    load_config,
    parse_values,
    provenance,
    reproduce,
    run_sweep,
    tsnr_of,
)
from .modeselect import STRATEGIES, select
from .montecarlo import SCHEDULERS, run_trials

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

REGIME_NAMES = {
    "general": Regime.GENERAL,
    "noise": Regime.NOISE_LIMITED,
    "noise_limited": Regime.NOISE_LIMITED,
    "interference": Regime.INTERFERENCE_LIMITED,
    "interference_limited": Regime.INTERFERENCE_LIMITED,
    "large_k": Regime.LARGE_K,
    "auto": None,
}

DEFAULTS = {
    "nt": 4, "k": 10, "m": 1, "alpha2": 0.01, "eps": 0.05, "tsnr_db": (0.0,), "rho": None,
    "delta_r": 0.01, "method": "auto", "strategy": "paper_scan", "trials": None, "seed": None,
    "scheduling": "all_users", "workers": 1, "r": None, "regime": "general", "form": "derived",
    "name": "sweep", "schemes": SCHEMES, "sweep": None,
}


class UsageError(ValueError):
    pass


class NumericalFailure(Exception):
    def __init__(self, regime, cause):
        super().__init__(f"numerical failure in the {regime} regime: {cause}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _system_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("system")
    g.add_argument("--nt", type=int, help="BS antennas N_t (default 4)")
    g.add_argument("--k", type=int, help="number of users K (default 10)")
    g.add_argument("--m", type=int, help="transmission mode M (default 1)")
    g.add_argument("--alpha2", type=float, help="eavesdropper path gain alpha^2 (default 0.01)")
    g.add_argument("--eps", type=float, help="outage target (default 0.05)")
    snr = g.add_mutually_exclusive_group()
    snr.add_argument("--tsnr-db", type=float, nargs="+", help="transmit SNR in dB, one or more (default 0)")
    snr.add_argument("--rho", type=float, nargs="+", help="transmit SNR, linear")
    g.add_argument("--delta-r", type=float, help="rate step of the mode-selection scan (default 0.01)")
    g.add_argument("--method", choices=("auto", "closed_form", "quadrature"), help="outage evaluation path")
    o = p.add_argument_group("output")
    o.add_argument("--config", help="INI experiment file; flags override its values")
    o.add_argument("--out", help="write CSV here instead of stdout")
    o.add_argument("--format", choices=("csv",), default="csv")
    return p


def _mc_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("simulation")
    g.add_argument("--trials", type=int, help="Monte Carlo slots")
    g.add_argument("--seed", type=int, help="RNG seed (64-bit unsigned)")
    g.add_argument("--scheduling", choices=SCHEDULERS, help="beam assignment rule (default all_users)")
    g.add_argument("--strict-scheduling", action="store_true", help="one beam per user (same as --scheduling strict)")
    g.add_argument("--workers", type=int, help="worker processes")
    return p


def build_parser():
    sysf, mcf = _system_flags(), _mc_flags()
    parser = argparse.ArgumentParser(prog="mimosec", description="Secrecy outage capacity and mode selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analytic", parents=[sysf], help="closed-form / quadrature quantities")
    a.add_argument("quantity", choices=("outage", "capacity", "interception", "asymptotic"))
    a.add_argument("--r", type=float, nargs="+", help="per-beam secrecy rate(s), b/s/Hz")
    a.add_argument("--regime", choices=tuple(REGIME_NAMES), help="evaluation regime (default general)")
    a.add_argument("--form", choices=("derived", "printed"), help="noise-limited formula variant")

    s = sub.add_parser("simulate", parents=[sysf, mcf], help="Monte Carlo simulation")
    s.add_argument("--r", type=float, nargs="+", help="rate(s) for empirical outage (default: analytic capacity)")

    c = sub.add_parser("select", parents=[sysf], help="mode selection")
    c.add_argument("scheme", choices=("ams", "ftm1", "ftm2"))
    c.add_argument("--strategy", choices=STRATEGIES)

    w = sub.add_parser("sweep", parents=[sysf, mcf], help="parameter sweep")
    w.add_argument("--sweep", action="append", metavar="NAME=VALUES",
                   help="swept parameter; VALUES is v1,v2,... or start:stop:step (repeatable)")
    w.add_argument("--schemes", help="comma-separated subset of AMS,FTM1,FTM2")
    w.add_argument("--strategy", choices=STRATEGIES)
    w.add_argument("--name")

    r = sub.add_parser("reproduce", parents=[sysf, mcf], help="table and figure data")
    r.add_argument("target", choices=TARGETS)
    r.add_argument("--strategy", choices=STRATEGIES)
    return parser


def resolve(args):
    """Merge flags over config-file values over defaults."""
    conf = load_config(args.config) if getattr(args, "config", None) else {}
    out = dict(DEFAULTS)
    for key, val in conf.items():
        if key in ("tsnr_db", "rho", "r") and not isinstance(val, tuple):
            val = (val,)
        out[key] = val
    if "rho" in conf and "tsnr_db" not in conf:
        out["tsnr_db"] = None
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = tuple(val) if isinstance(val, list) else val
            if key == "rho":
                out["tsnr_db"] = None
            elif key == "tsnr_db":
                out["rho"] = None
    if getattr(args, "strict_scheduling", False):
        out["scheduling"] = "strict"
    if isinstance(out["schemes"], str):
        out["schemes"] = tuple(s.strip().upper() for s in out["schemes"].split(",") if s.strip())
    return out


def snr_grid(opts):
    if opts["rho"] is not None:
        return [float(r) for r in opts["rho"]]
    return [db_to_linear(float(d)) for d in opts["tsnr_db"]]


def base_config(opts, snr=1.0):
    return SystemConfig(n_antennas=opts["nt"], n_users=opts["k"], mode=opts["m"], snr=snr,
                        alpha2=opts["alpha2"], eps=opts["eps"])


def _cfg_cols(cfg):
    return {"nt": cfg.n_antennas, "k": cfg.n_users, "m": cfg.mode, "alpha2": cfg.alpha2, "eps": cfg.eps,
            "tsnr_db": tsnr_of(cfg), "rho": cfg.snr}


CFG_COLS = ("nt", "k", "m", "alpha2", "eps", "tsnr_db", "rho")


def _regime_for(opts, cfg):
    reg = REGIME_NAMES[opts["regime"]]
    return asy.detect_regime(cfg) if reg is None else reg


def _guard(regime, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except NUMERICAL_ERRORS as exc:
        raise NumericalFailure(regime.value, exc) from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _outage(cfg, r, regime, opts):
    if regime is Regime.GENERAL:
        return outage_probability(r, cfg, opts["method"])
    if regime is Regime.NOISE_LIMITED:
        return asy.outage_noise_limited(r, cfg, opts["form"])
    if regime is Regime.INTERFERENCE_LIMITED:
        return asy.outage_interference_limited(cfg.mode * r, cfg)
    return asy.outage_large_k(r, cfg)


def _interception(cfg, regime, opts):
    if regime is Regime.GENERAL:
        return interception_probability(cfg, opts["method"])
    if regime is Regime.NOISE_LIMITED:
        return asy.interception_noise_limited(cfg, opts["form"])
    if regime is Regime.INTERFERENCE_LIMITED:
        return asy.interception_interference_limited(cfg.n_users)
    return asy.interception_large_k(cfg)


def cmd_analytic(args, opts):
    q = args.quantity
    rows = []
    if q == "outage":
        cols = CFG_COLS + ("regime", "r", "outage")
    elif q == "interception":
        cols = CFG_COLS + ("regime", "interception")
    elif q == "capacity":
        cols = CFG_COLS + ("regime", "rate", "sum_capacity", "achieved_outage")
    else:
        cols = CFG_COLS + ("regime", "asymptotic_mode", "interception", "r", "outage")
    for snr in snr_grid(opts):
        cfg = base_config(opts, snr)
        regime = _regime_for(opts, cfg)
        head = {**_cfg_cols(cfg), "regime": regime.value}
        if q == "outage":
            for r in opts["r"] or (0.0,):
                rows.append({**head, "r": r, "outage": _guard(regime, _outage, cfg, r, regime, opts)})
        elif q == "interception":
            rows.append({**head, "interception": _guard(regime, _interception, cfg, regime, opts)})
        elif q == "capacity":
            if regime is Regime.GENERAL:
                res = _guard(regime, secrecy_outage_capacity, cfg, opts["method"])
                rows.append({**head, "rate": res.rate, "sum_capacity": cfg.mode * res.rate,
                             "achieved_outage": res.achieved_outage})
            elif regime is Regime.INTERFERENCE_LIMITED:
                s = _guard(regime, asy.interference_limited_sum_capacity, cfg)
                rows.append({**head, "rate": s / cfg.mode, "sum_capacity": s,
                             "achieved_outage": asy.outage_interference_limited(s, cfg)})
            else:
                raise UsageError(f"analytic capacity supports the general and interference regimes, not {regime.value}")
        else:
            if regime is Regime.GENERAL:
                raise UsageError("no asymptotic rule for the general regime; pick --regime or use 'select ams'")
            mode = asy.asymptotic_mode(regime, cfg)
            for r in opts["r"] or (None,):
                row = {**head, "asymptotic_mode": mode,
                       "interception": _guard(regime, _interception, cfg, regime, opts), "r": r}
                if r is not None:
                    row["outage"] = _guard(regime, _outage, cfg, r, regime, opts)
                rows.append(row)
    params = {"method": opts["method"]}
    if opts["regime"] != "general":
        params["regime"] = opts["regime"]
    if opts["regime"] in ("noise", "noise_limited"):
        params["form"] = opts["form"]
    return Table(f"analytic {q}", cols, rows, provenance(f"analytic {q}", params)), EXIT_OK


def cmd_simulate(args, opts):
    trials = 200_000 if opts["trials"] is None else opts["trials"]
    if trials < 1:
        raise UsageError("--trials must be >= 1 for simulate; for trials = 0 use analytic")
    if opts["seed"] is None:
        raise UsageError("simulate needs --seed for reproducibility")
    if opts["workers"] < 1:
        raise UsageError("--workers must be >= 1")
    cols = CFG_COLS + ("scheduling", "trials", "rate", "empirical_outage", "outage_std_err", "analytic_outage",
                       "empirical_interception", "interception_std_err", "mean_sum_secrecy",
                       "sum_secrecy_std_err", "starved_beams")
    rows = []
    for snr in snr_grid(opts):
        cfg = base_config(opts, snr)
        regime = asy.detect_regime(cfg)
        rates = opts["r"]
        if not rates:
            rates = (_guard(regime, secrecy_outage_capacity, cfg, opts["method"]).rate,)
        st = run_trials(cfg, trials, rates, rng_seed=opts["seed"], scheduling=opts["scheduling"],
                        workers=opts["workers"])
        for i, r in enumerate(st.rates):
            rows.append({
                **_cfg_cols(cfg), "scheduling": opts["scheduling"], "trials": trials, "rate": r,
                "empirical_outage": st.empirical_outage[i], "outage_std_err": st.outage_std_err[i],
                "analytic_outage": _guard(regime, outage_probability, r, cfg, opts["method"]),
                "empirical_interception": st.empirical_interception,
                "interception_std_err": st.interception_std_err,
                "mean_sum_secrecy": st.mean_sum_secrecy, "sum_secrecy_std_err": st.std_err,
                "starved_beams": st.starved_beams,
            })
    comments = provenance("simulate", {"method": opts["method"]}, opts["seed"])
    return Table("simulate", cols, rows, comments), EXIT_OK


def cmd_select(args, opts):
    cols = CFG_COLS[:2] + CFG_COLS[3:] + ("scheme", "mode", "rate", "sum_capacity", "chosen", "margin", "status")
    rows = []
    for snr in snr_grid(opts):
        cfg = base_config(opts, snr)
        regime = asy.detect_regime(cfg)
        d = _guard(regime, select, cfg, args.scheme, strategy=opts["strategy"], delta_r=opts["delta_r"],
                   method=opts["method"])
        head = _cfg_cols(cfg)
        head.pop("m")
        for m in range(1, cfg.n_antennas + 1):
            if m in d.per_mode_sum_capacity:
                rows.append({**head, "scheme": d.scheme, "mode": m, "rate": d.per_mode_rate[m],
                             "sum_capacity": d.per_mode_sum_capacity[m], "chosen": m == d.chosen,
                             "margin": d.margin if m == d.chosen else None, "status": "ok"})
            elif m in d.failures:
                rows.append({**head, "scheme": d.scheme, "mode": m, "chosen": False,
                             "status": f"failed: {d.failures[m]}"})
    params = {"strategy": opts["strategy"], "delta_r": opts["delta_r"], "method": opts["method"]}
    return Table(f"select {args.scheme}", cols, rows, provenance(f"select {args.scheme}", params)), EXIT_OK


def _parse_sweep_flag(text):
    if "=" not in text:
        raise UsageError(f"--sweep expects NAME=VALUES, got {text!r}")
    name, values = text.split("=", 1)
    name = name.strip().replace("-", "_")
    if name not in SWEEP_PARAMS:
        raise UsageError(f"cannot sweep {name!r}; choose from {sorted(SWEEP_PARAMS)}")
    return name, parse_values(name, values)


def cmd_sweep(args, opts):
    if args.sweep:
        sweep = tuple(_parse_sweep_flag(s) for s in args.sweep)
    elif opts["sweep"]:
        sweep = tuple(opts["sweep"])
    else:
        sweep = (("rho", tuple(snr_grid(opts))),)
    spec = ExperimentSpec(
        name=opts["name"], base=base_config(opts, snr_grid(opts)[0]), sweep=sweep,
        schemes=tuple(s.upper() for s in opts["schemes"]), trials=opts["trials"] or 0,
        seed=opts["seed"] or 0, strategy=opts["strategy"], delta_r=opts["delta_r"],
        method=opts["method"], scheduling=opts["scheduling"], workers=opts["workers"],
    )
    table = run_sweep(spec)
    return table, EXIT_NUMERICAL if table.failures else EXIT_OK


def cmd_reproduce(args, opts):
    target = args.target
    kw = {"strategy": opts["strategy"], "delta_r": opts["delta_r"], "method": opts["method"]}
    if target.startswith("fig"):
        explicit = args.tsnr_db is not None or args.rho is not None
        kw["tsnr_db"] = [tsnr_of(base_config(opts, s)) for s in snr_grid(opts)] if explicit else FIGURE_TSNR_DB
        if target == "fig5":
            kw = {"tsnr_db": kw["tsnr_db"], "method": opts["method"],
                  "trials": 200_000 if opts["trials"] is None else opts["trials"],
                  "seed": opts["seed"] or 0, "scheduling": opts["scheduling"], "workers": opts["workers"]}
            if kw["trials"] < 0:
                raise UsageError("--trials must be >= 0")
    table = reproduce(target, **kw)
    return table, EXIT_NUMERICAL if table.failures else EXIT_OK


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "select": cmd_select,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def _emit(table, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            table.write_csv(fh)
    else:
        sys.stdout.write(table.to_csv())
        sys.stdout.flush()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        table, code = COMMANDS[args.command](args, opts)
    except NumericalFailure as exc:
        print(f"mimosec: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"mimosec: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(table, getattr(args, "out", None))
    if table.failures:
        for f in table.failures:
            print(f"mimosec: cell {f[0]}, {format_value(f[1])}: {f[2]}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

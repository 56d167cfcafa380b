"""Command-line front end.

Exit codes: 0 success, 1 input/validation problems, 2 fit or model-domain
failures, 64 usage errors.  Every randomized subcommand takes --seed
(default 0) and records it in its output, and repeated runs with identical
inputs and flags produce byte-identical output files.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict

from . import fitting, icp, kinematics, simulate
from .baselines import HuangParams, WobbrockParams, huang_er_circular, wobbrock_er
from .errors import (
    ClickpointError,
    ConfigError,
    DegenerateTrialError,
    DomainError,
    FitError,
    NoSubmovementError,
    ParseError,
    ValidationError,
)
from .icp import IcpParams, predict_trial
from .trajlog import parse_session, write_session

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_FIT = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse normally exits 2 on bad flags; we reserve 2 for fit errors
    and map usage problems to 64 instead."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


def _add_segmentation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel-sigma", type=float, default=kinematics.DEFAULT_KERNEL_SIGMA,
                   help="Gaussian smoothing sigma in samples")
    p.add_argument("--threshold", type=float, default=kinematics.DEFAULT_PERSISTENCE_THRESHOLD,
                   help="persistence threshold on the smoothed speed profile")
    p.add_argument("--min-duration", type=float, default=kinematics.DEFAULT_MIN_DURATION,
                   help="minimum submovement duration in seconds")
    p.add_argument("--fallback-whole-trial", action="store_true",
                   help="treat the whole trial as one submovement when none segments")


def _params_from_args(args) -> IcpParams:
    return IcpParams(c_mu=args.c_mu, c_sigma=args.c_sigma, nu=args.nu, delta=args.delta)


def _add_params_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c-mu", dest="c_mu", type=float, required=True)
    p.add_argument("--c-sigma", dest="c_sigma", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)


def _collect_features(session, args):
    """(kept, n_excluded): per-trial features joined with the success flag.

    Degenerate and unsegmentable trials are excluded (or, with the fallback
    flag, widened to the whole trial) rather than failing the run.
    """
    kept = []
    excluded = 0
    for trial in session.trials:
        try:
            feats = kinematics.trial_features(
                trial,
                kernel_sigma_samples=args.kernel_sigma,
                threshold=args.threshold,
                min_duration=args.min_duration,
                fallback_whole_trial=args.fallback_whole_trial,
            )
        except (DegenerateTrialError, NoSubmovementError):
            excluded += 1
            continue
        kept.append((trial.trial_id, feats, trial.success))
    return kept, excluded


def _cmd_ingest(args) -> int:
    session = parse_session(args.infile, pixel_units=args.pixel_units)
    _write_text(args.out, write_session(session))
    return EXIT_OK


def _cmd_segment(args) -> int:
    session = parse_session(args.infile)
    buf = io.StringIO()
    buf.write("trial_id,seg_index,t_start,t_peak,t_end\n")
    skipped = 0
    for trial in session.trials:
        if trial.degenerate:
            skipped += 1
            continue
        prof = kinematics.smooth(kinematics.speed_profile(trial), args.kernel_sigma)
        segs = kinematics.segment_submovements(prof, args.threshold, args.min_duration)
        for i, s in enumerate(segs):
            buf.write(f"{trial.trial_id},{i},{_fmt(s.t_start)},{_fmt(s.t_peak)},{_fmt(s.t_end)}\n")
    _write_text(args.out, buf.getvalue())
    if skipped:
        print(f"skipped {skipped} degenerate trial(s)", file=sys.stderr)
    return EXIT_OK


def _cmd_features(args) -> int:
    session = parse_session(args.infile)
    kept, excluded = _collect_features(session, args)
    buf = io.StringIO()
    buf.write("trial_id,v_px,v_py,v_tx,v_ty,w_intersect,w_t,t_c,p,success\n")
    for trial_id, f, success in kept:
        buf.write(
            f"{trial_id},{_fmt(f.v_p[0])},{_fmt(f.v_p[1])},{_fmt(f.v_t[0])},{_fmt(f.v_t[1])},"
            f"{_fmt(f.W_intersect)},{_fmt(f.W_t)},{_fmt(f.t_c)},{_fmt(f.P)},"
            f"{1 if success else 0}\n"
        )
    _write_text(args.out, buf.getvalue())
    if excluded:
        print(f"excluded {excluded} trial(s) without a usable submovement", file=sys.stderr)
    return EXIT_OK


def _cmd_predict(args) -> int:
    session = parse_session(args.infile)
    params = _params_from_args(args)
    kept, excluded = _collect_features(session, args)
    buf = io.StringIO()
    buf.write("trial_id,w_t,t_c,p,er_pred\n")
    for trial_id, f, _ in kept:
        er = predict_trial(params, f)
        buf.write(f"{trial_id},{_fmt(f.W_t)},{_fmt(f.t_c)},{_fmt(f.P)},{_fmt(er)}\n")
    _write_text(args.out, buf.getvalue())
    if excluded:
        print(f"excluded {excluded} trial(s) without a usable submovement", file=sys.stderr)
    return EXIT_OK


def _bin_rows(bins, params):
    rows = []
    for b in bins:
        er_pred = None
        if params is not None:
            er_pred = float(icp._er_array(params, b.mean_W_t, b.mean_t_c, b.mean_P))
        rows.append(
            {
                "bin": b.bin_index,
                "n": b.n_trials,
                "index_mean": b.mean_index_value,
                "wt_mean": b.mean_W_t,
                "tc_mean": b.mean_t_c,
                "p_mean": b.mean_P,
                "er_obs": b.observed_er,
                "er_pred": er_pred,
            }
        )
    return rows


def _bin_table_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("bin,n,index_mean,wt_mean,tc_mean,p_mean,er_obs,er_pred\n")
    for r in rows:
        buf.write(
            f"{r['bin']},{r['n']},{_fmt(r['index_mean'])},{_fmt(r['wt_mean'])},"
            f"{_fmt(r['tc_mean'])},{_fmt(r['p_mean'])},{_fmt(r['er_obs'])},{_fmt(r['er_pred'])}\n"
        )
    return buf.getvalue()


def _fit_payload(session, args):
    kept, excluded = _collect_features(session, args)
    trials = [(f, s) for _, f, s in kept]
    bins = fitting.bin_trials(trials, args.bins, index=args.index)
    fit = fitting.fit_icp(bins, budget=args.budget, seed=args.seed)
    rows = _bin_rows(bins, fit.params)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "n_bins": args.bins,
        "index": args.index,
        "budget": args.budget,
        "n_trials_used": len(trials),
        "n_trials_excluded": excluded,
        "params": asdict(fit.params),
        "sse": fit.sse,
        "r2": fit.r2,
        "adjusted_r2": fit.adjusted_r2,
        "k_free": fit.k_free,
        "bins": rows,
    }
    return payload, rows, trials


def _cmd_fit(args) -> int:
    session = parse_session(args.infile)
    payload, rows, _ = _fit_payload(session, args)
    payload["command"] = "fit"
    _write_text(args.out, _json_dumps(payload))
    if args.bin_table:
        _write_text(args.bin_table, _bin_table_csv(rows))
    return EXIT_OK


def _cmd_crossval(args) -> int:
    session = parse_session(args.infile)
    kept, excluded = _collect_features(session, args)
    trials = [(f, s) for _, f, s in kept]
    mae = fitting.crossval(
        trials, n_folds=args.folds, seed=args.seed, n_bins=args.bins, budget=args.budget,
        index=args.index,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "crossval",
        "seed": args.seed,
        "n_bins": args.bins,
        "n_folds": args.folds,
        "index": args.index,
        "budget": args.budget,
        "n_trials_used": len(trials),
        "n_trials_excluded": excluded,
        "mae_pp": mae,
    }
    _write_text(args.out, _json_dumps(payload))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = simulate.parse_scenario(args.config)
    session, truths = simulate.simulate_session(cfg)
    _write_text(args.out, write_session(session))
    truth_path = args.truth_out
    if truth_path is None and args.out != "-":
        truth_path = args.out + ".truth.csv"
    if truth_path is not None:
        _write_text(truth_path, simulate.write_ground_truth(truths))
    return EXIT_OK


def _cmd_baseline(args) -> int:
    if args.model == "wobbrock":
        er = wobbrock_er(WobbrockParams(a=args.a, b=args.b), D=args.D, W=args.W, MT_e=args.mt)
    else:
        params = HuangParams(
            a_t=args.a_t, b_t=args.b_t, c_t=args.c_t, d_t=args.d_t, e_t=args.e_t,
            f_t=args.f_t, g_t=args.g_t, d_n=args.d_n, e_n=args.e_n, f_n=args.f_n,
        )
        er = huang_er_circular(params, V=args.V, W=args.W, n_samples=args.n_samples,
                               seed=args.seed)
    print(_fmt(er))
    return EXIT_OK


def _cmd_report(args) -> int:
    session = parse_session(args.infile)
    payload, rows, trials = _fit_payload(session, args)
    payload["command"] = "report"
    try:
        payload["mae_crossval_pp"] = fitting.crossval(
            trials, n_folds=args.folds, seed=args.seed, n_bins=args.bins,
            budget=args.budget, index=args.index,
        )
    except FitError as exc:
        payload["mae_crossval_pp"] = None
        payload["crossval_error"] = str(exc)
    _write_text(args.out, _json_dumps(payload))
    _write_text(args.bin_table, _bin_table_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clickpoint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate a session file and rewrite it canonically")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--pixel-units", action="store_true",
                   help="input coordinates are device pixels; convert via the dpi header")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("segment", help="dump submovement boundaries per trial")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    _add_segmentation_flags(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("features", help="extract per-trial predictor variables")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    _add_segmentation_flags(p)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("predict", help="predict per-trial error rates at fixed parameters")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    _add_segmentation_flags(p)
    _add_params_flags(p)
    p.set_defaults(func=_cmd_predict)

    def fit_like(name, help_text):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--in", dest="infile", required=True)
        q.add_argument("--out", default="-")
        q.add_argument("--bins", type=int, default=36)
        q.add_argument("--index", choices=sorted(fitting.INDEX_KEYS), default="wt_over_p")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--budget", type=int, default=fitting.DEFAULT_BUDGET)
        _add_segmentation_flags(q)
        return q

    p = fit_like("fit", "fit the timing model to binned error rates")
    p.add_argument("--bin-table", default=None, help="also write the bin table CSV here")
    p.set_defaults(func=_cmd_fit)

    p = fit_like("crossval", "cross-validated mean absolute error")
    p.add_argument("--folds", type=int, default=2)
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("simulate", help="generate a synthetic session from a scenario file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", default=None,
                   help="ground-truth sidecar path (default: <out>.truth.csv)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("baseline", help="evaluate a baseline error-rate model")
    bsub = p.add_subparsers(dest="model", required=True, parser_class=_Parser)
    q = bsub.add_parser("wobbrock")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--D", type=float, required=True)
    q.add_argument("--W", type=float, required=True)
    q.add_argument("--mt", type=float, required=True)
    q.set_defaults(func=_cmd_baseline)
    q = bsub.add_parser("huang")
    for name in ("a_t", "b_t", "c_t", "d_t", "e_t", "f_t", "g_t", "d_n", "e_n", "f_n"):
        q.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=0.0)
    q.add_argument("--V", type=float, required=True)
    q.add_argument("--W", type=float, required=True)
    q.add_argument("--n-samples", dest="n_samples", type=int, default=10**6)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=_cmd_baseline)

    p = fit_like("report", "fit + crossval + bin table bundle for plotting")
    p.add_argument("--folds", type=int, default=2)
    p.add_argument("--bin-table", default="-",
                   help="where to write the bin table CSV (default stdout)")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ParseError, ValidationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FitError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except ClickpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

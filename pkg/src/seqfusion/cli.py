"""Command-line entry point: ``seqfusion <command> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import formats
from .config import RunConfig, load_config
from .core import Method
from .evaluation import (
    accuracy_with_delay,
    delay_sweep,
    group_means,
    summarize,
    timing_bench,
    welch_ttest,
)
from .fusion import fuse_pipeline
from .simulator import PRESETS, generate_session
from .transition import format_matrix, read_matrix, validate_rules

METHOD_CHOICES = [m.slug for m in Method]


def _fusion_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file or a previous result JSON")
    p.add_argument("--method", choices=METHOD_CHOICES)
    p.add_argument("--lw", dest="l_w", type=int, help="smoothing window length")
    p.add_argument("--lv", dest="l_v", type=int, help="voting half-window (delayed frames)")
    p.add_argument("--matrix", dest="matrix_file", help="transition matrix text file")
    p.add_argument("--p-stay", dest="p_stay", type=float)
    p.add_argument("--p-even", dest="p_even", type=float)
    p.add_argument("--p-odd", dest="p_odd", type=float)
    p.add_argument("--frame-rate", dest="frame_rate_hz", type=float)


def _session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--segments", help="e.g. LG:30,US:20,LG:30")
    p.add_argument("--concentration", type=float)
    p.add_argument("--error-rate", dest="error_rate", type=float)
    p.add_argument("--error-bias", dest="error_bias", type=float)


_CONFIG_KEYS = {
    "method", "l_w", "l_v", "matrix_file", "p_stay", "p_even", "p_odd", "frame_rate_hz",
    "trials", "seed", "preset", "segments", "concentration", "error_rate", "error_bias",
    "windows",
}


def _run_config(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
    return base.merged(overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqfusion",
        description="HMM decision fusion for locomotion-environment classifier scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write synthetic score CSV trials")
    p.add_argument("--config")
    p.add_argument("--frame-rate", dest="frame_rate_hz", type=float)
    _session_flags(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--prefix", default="trial")

    p = sub.add_parser("fuse", help="fuse one score CSV into a decisions CSV")
    _fusion_flags(p)
    p.add_argument("input")
    p.add_argument("-o", "--out", help="decisions CSV (default: <input>_decisions.csv)")
    p.add_argument("--trace", help="also write the full fusion trace as JSON")

    p = sub.add_parser("eval", help="score trials against their truth column")
    _fusion_flags(p)
    p.add_argument("inputs", nargs="+", help="score CSVs carrying a truth column")
    p.add_argument("--decisions", nargs="+", help="precomputed decisions CSVs, one per input")
    p.add_argument("--compare", choices=METHOD_CHOICES, help="also t-test against this method")
    p.add_argument("--seed", type=int, help="recorded in the config echo")
    p.add_argument("-o", "--out", help="result JSON (default: print to stdout)")

    p = sub.add_parser("delay-sweep", help="accuracy versus decision delay")
    _fusion_flags(p)
    _session_flags(p)
    p.add_argument("inputs", nargs="*", help="score CSVs; simulated from the config when omitted")
    p.add_argument("--windows", help="odd full voting windows, e.g. 1,3,5,7,9,11")
    p.add_argument("--methods", default=",".join(METHOD_CHOICES))
    p.add_argument("-o", "--out", default="sweep.json")
    p.add_argument("--csv", default="sweep.csv")

    p = sub.add_parser("ttest", help="Welch t-test between two accuracy lists")
    p.add_argument("a", help="result JSON or comma-separated accuracies")
    p.add_argument("b", help="result JSON or comma-separated accuracies")
    p.add_argument("--group-size", type=int, default=1, help="average consecutive trials first")
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("bench", help="time one fusion update")
    _fusion_flags(p)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate-matrix", help="check a transition matrix against the design rules")
    p.add_argument("matrix", nargs="?", help="matrix text file (default: build from parameters)")
    p.add_argument("--p-stay", dest="p_stay", type=float)
    p.add_argument("--p-even", dest="p_even", type=float)
    p.add_argument("--p-odd", dest="p_odd", type=float)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    session = generate_session(cfg.script(), cfg.noise(), cfg.trials)
    width = max(2, len(str(len(session))))
    for k, stream in enumerate(session, 1):
        path = out / f"{args.prefix}{k:0{width}d}.csv"
        formats.write_score_csv(stream, path)
        print(path)
    return 0


def _cmd_fuse(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    stream = formats.read_score_csv(args.input, cfg.frame_rate_hz)
    trace = fuse_pipeline(stream, cfg.method, cfg.fusion_config())
    out = args.out or str(Path(args.input).with_name(Path(args.input).stem + "_decisions.csv"))
    formats.write_decisions_csv(trace, out)
    if args.trace:
        formats.write_trace_json(trace, args.trace)
    delay_ms = trace.delay_frames * 1000.0 / stream.frame_rate_hz
    print(
        f"method={trace.method.value} frames={len(trace)} "
        f"delay_frames={trace.delay_frames} delay_ms={delay_ms:.1f} -> {out}"
    )
    return 0


def _score_inputs(inputs, decisions, method: Method, cfg: RunConfig) -> list[float]:
    fcfg = cfg.fusion_config()
    accs = []
    for k, path in enumerate(inputs):
        stream = formats.read_score_csv(path, cfg.frame_rate_hz)
        if stream.truth is None:
            raise ValueError(f"{path}: no truth column; cannot score accuracy")
        if decisions:
            labels = formats.read_decisions_csv(decisions[k])
            if len(labels) != len(stream):
                raise ValueError(f"{decisions[k]} has {len(labels)} decisions for {len(stream)} frames")
            hits = sum(1 for d, y in zip(labels, stream.truth) if d == y)
            accs.append(hits / len(stream))
        else:
            accs.append(accuracy_with_delay(fuse_pipeline(stream, method, fcfg), stream.truth))
    return accs


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if args.decisions and len(args.decisions) != len(args.inputs):
        raise ValueError("--decisions needs exactly one file per input")
    method = Method.parse(cfg.method)
    accs = _score_inputs(args.inputs, args.decisions, method, cfg)
    report = summarize(accs, cfg.frame_rate_hz, method.delay_frames(cfg.l_v), method)
    ttest = None
    if args.compare:
        other = Method.parse(args.compare)
        other_accs = _score_inputs(args.inputs, None, other, cfg)
        t, p = welch_ttest(accs, other_accs)
        ttest = {
            "against": other.value,
            "against_per_trial_accuracy": other_accs,
            "t": t,
            "p": p,
            "alpha": 0.05,
            "significant": p < 0.05,
        }
    if args.out:
        formats.write_result_json(report, args.out, config=cfg.to_dict(), ttest=ttest)
        print(
            f"{method.value}: mean={report.mean:.4f} sd={report.sd:.4f} "
            f"delay={report.delay_frames} frames ({report.delay_ms:.1f} ms) -> {args.out}"
        )
    else:
        sys.stdout.write(formats.dumps_result(formats.result_document(report, cfg.to_dict(), ttest)))
    return 0


def _cmd_delay_sweep(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if args.inputs:
        session = [formats.read_score_csv(p, cfg.frame_rate_hz) for p in args.inputs]
        for p, s in zip(args.inputs, session):
            if s.truth is None:
                raise ValueError(f"{p}: no truth column; cannot score accuracy")
    else:
        session = generate_session(cfg.script(), cfg.noise(), cfg.trials)
    methods = [Method.parse(m.strip()) for m in args.methods.split(",") if m.strip()]
    sweep = delay_sweep(session, cfg.fusion_config(), methods, cfg.window_list())
    formats.write_result_json(sweep, args.out, config=cfg.to_dict())
    formats.write_sweep_csv(sweep, args.csv)
    for method, slope in sweep.slopes.items():
        shown = "n/a" if slope is None else f"{slope:.4f} %/frame"
        print(f"{method.value}: slope {shown}")
    print(f"-> {args.out}, {args.csv}")
    return 0


def _cmd_ttest(args: argparse.Namespace) -> int:
    a = formats.accuracies_from(args.a)
    b = formats.accuracies_from(args.b)
    if args.group_size > 1:
        a, b = group_means(a, args.group_size), group_means(b, args.group_size)
    t, p = welch_ttest(a, b)
    verdict = "significant" if p < args.alpha else "not significant"
    print(f"t={t:.6g} p={p:.6g} ({verdict} at alpha={args.alpha})")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    median, p99 = timing_bench(args.steps, cfg.fusion_config(), args.seed)
    print(f"steps={args.steps} median={median * 1e6:.2f} us p99={p99 * 1e6:.2f} us")
    return 0


def _cmd_validate_matrix(args: argparse.Namespace) -> int:
    if args.matrix:
        m = read_matrix(args.matrix)
    else:
        m = RunConfig().merged(
            {"p_stay": args.p_stay, "p_even": args.p_even, "p_odd": args.p_odd}
        ).matrix()
        sys.stdout.write(format_matrix(m))
    violations = validate_rules(m)
    for v in violations:
        print(f"violation: {v}")
    if violations:
        return 1
    print("ok: all transition rules hold")
    return 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "fuse": _cmd_fuse,
    "eval": _cmd_eval,
    "delay-sweep": _cmd_delay_sweep,
    "ttest": _cmd_ttest,
    "bench": _cmd_bench,
    "validate-matrix": _cmd_validate_matrix,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"seqfusion {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

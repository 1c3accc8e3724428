"""Score/decision CSV files and the JSON result schema."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Optional

from .core import EnvLabel, FusionTrace, InvalidDistributionError, Method, ScoreStream, normalize
from .evaluation import AccuracyReport, DelaySweep, SweepPoint

SCORE_COLUMNS = ("frame", "p_lg", "p_us", "p_ds", "p_ur", "p_dr")
DECISION_COLUMNS = ("frame", "decision") + tuple(f"posterior_{j}" for j in range(1, 6))
PROB_FORMAT = "{:.12f}"
SCHEMA_VERSION = 1


class FormatError(ValueError):
    """A file did not match its expected layout."""

    def __init__(self, path: str | Path, lineno: Optional[int], message: str):
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.lineno = lineno


def _open_rows(path: str | Path):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FormatError(path, None, f"cannot read file ({exc.strerror})") from exc
    return fh


def read_score_csv(path: str | Path, frame_rate_hz: float = 15.0) -> ScoreStream:
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError(path, 1, "empty file")
        header = [h.strip() for h in header]
        has_truth = header == list(SCORE_COLUMNS) + ["truth"]
        if not has_truth and header != list(SCORE_COLUMNS):
            raise FormatError(path, 1, f"expected header {','.join(SCORE_COLUMNS)}[,truth], got {','.join(header)}")
        frames, truth = [], []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(path, lineno, f"expected {len(header)} fields, got {len(row)}")
            try:
                frame = int(row[0])
                probs = [float(x) for x in row[1:6]]
            except ValueError:
                raise FormatError(path, lineno, f"non-numeric field in {row}") from None
            if frame != len(frames) + 1:
                raise FormatError(path, lineno, f"frame {frame} out of sequence; expected {len(frames) + 1}")
            try:
                frames.append(normalize(probs))
            except InvalidDistributionError as exc:
                raise FormatError(path, lineno, str(exc)) from None
            if has_truth:
                try:
                    truth.append(EnvLabel(int(row[6])))
                except ValueError:
                    raise FormatError(path, lineno, f"truth must be an integer 1..5, got {row[6]!r}") from None
    if not frames:
        raise FormatError(path, None, "no data rows")
    return ScoreStream(tuple(frames), tuple(truth) if has_truth else None, frame_rate_hz)


def write_score_csv(stream: ScoreStream, path: str | Path) -> None:
    header = list(SCORE_COLUMNS) + (["truth"] if stream.truth is not None else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, f in enumerate(stream.frames):
            row = [k + 1] + [PROB_FORMAT.format(x) for x in f.p]
            if stream.truth is not None:
                row.append(int(stream.truth[k]))
            w.writerow(row)


def write_decisions_csv(trace: FusionTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DECISION_COLUMNS)
        for k, (d, post) in enumerate(zip(trace.decisions, trace.posteriors)):
            w.writerow([k + 1, int(d)] + [PROB_FORMAT.format(x) for x in post.p])


def read_decisions_csv(path: str | Path) -> list[EnvLabel]:
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != list(DECISION_COLUMNS):
            raise FormatError(path, 1, f"expected header {','.join(DECISION_COLUMNS)}")
        out = []
        for row in reader:
            if not row:
                continue
            try:
                frame, label = int(row[0]), EnvLabel(int(row[1]))
            except (ValueError, IndexError):
                raise FormatError(path, reader.line_num, f"bad decision row {row}") from None
            if frame != len(out) + 1:
                raise FormatError(path, reader.line_num, f"frame {frame} out of sequence")
            out.append(label)
    return out


# -- JSON results -------------------------------------------------------------


def report_to_dict(report: AccuracyReport) -> dict[str, Any]:
    return {
        "method": report.method.value,
        "per_trial_accuracy": list(report.per_trial_accuracy),
        "mean": report.mean,
        "sd": report.sd,
        "delay_frames": report.delay_frames,
        "delay_ms": report.delay_ms,
        "frame_rate_hz": report.frame_rate_hz,
    }


def report_from_dict(d: dict[str, Any]) -> AccuracyReport:
    return AccuracyReport(
        per_trial_accuracy=tuple(d["per_trial_accuracy"]),
        mean=d["mean"],
        sd=d["sd"],
        method=Method.parse(d["method"]),
        delay_frames=d["delay_frames"],
        delay_ms=d["delay_ms"],
        frame_rate_hz=d.get("frame_rate_hz", 15.0),
    )


def sweep_to_dict(sweep: DelaySweep, frame_rate_hz: float = 15.0) -> dict[str, Any]:
    methods: dict[str, Any] = {}
    for method, slope in sweep.slopes.items():
        methods[method.value] = {
            "slope_pct_per_frame": slope,
            "points": [
                {
                    "window": p.window,
                    "delay_frames": p.delay_frames,
                    "delay_ms": p.delay_frames * 1000.0 / frame_rate_hz,
                    "mean": p.mean,
                    "sd": p.sd,
                }
                for p in sweep.for_method(method)
            ],
        }
    return {"methods": methods}


def sweep_from_dict(d: dict[str, Any]) -> DelaySweep:
    points, slopes = [], {}
    for name, block in d["methods"].items():
        method = Method.parse(name)
        slopes[method] = block["slope_pct_per_frame"]
        points.extend(
            SweepPoint(method, p["window"], p["delay_frames"], p["mean"], p["sd"])
            for p in block["points"]
        )
    return DelaySweep(tuple(points), slopes)


def result_document(
    result: AccuracyReport | DelaySweep,
    config: Optional[dict[str, Any]] = None,
    ttest: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    if isinstance(result, AccuracyReport):
        doc = {"kind": "accuracy", **report_to_dict(result)}
    elif isinstance(result, DelaySweep):
        rate = (config or {}).get("frame_rate_hz", 15.0)
        doc = {"kind": "sweep", "sweep": sweep_to_dict(result, rate)}
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
    doc["schema_version"] = SCHEMA_VERSION
    if config is not None:
        doc["config"] = config
    if ttest is not None:
        doc["ttest"] = ttest
    return doc


def dumps_result(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_result_json(
    result: AccuracyReport | DelaySweep,
    path: str | Path,
    config: Optional[dict[str, Any]] = None,
    ttest: Optional[dict[str, Any]] = None,
) -> None:
    """Write a report or sweep with sorted keys so identical runs give identical bytes."""
    text = dumps_result(result_document(result, config, ttest))
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write result to {path}: {exc.strerror}") from exc


def read_result_json(path: str | Path) -> tuple[AccuracyReport | DelaySweep, dict[str, Any]]:
    """Load a result file; returns the parsed result and the raw document."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(path, None, f"cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    kind = doc.get("kind")
    if kind == "accuracy":
        return report_from_dict(doc), doc
    if kind == "sweep":
        return sweep_from_dict(doc["sweep"]), doc
    raise FormatError(path, None, f"unknown result kind {kind!r}")


def write_sweep_csv(sweep: DelaySweep, path: str | Path) -> None:
    """Tidy (method, delay, mean, sd) table for external plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "window", "delay_frames", "mean", "sd"])
        for p in sweep.points:
            w.writerow([p.method.value, p.window, p.delay_frames, repr(p.mean), repr(p.sd)])


def write_trace_json(trace: FusionTrace, path: str | Path) -> None:
    doc = {
        "method": trace.method.value,
        "delay_frames": trace.delay_frames,
        "decisions": [int(d) for d in trace.decisions],
        "posteriors": [list(p.p) for p in trace.posteriors],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def accuracies_from(source: str) -> list[float]:
    """Per-trial accuracies from a result JSON path or a comma-separated list."""
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        result, _ = read_result_json(path)
        if not isinstance(result, AccuracyReport):
            raise FormatError(path, None, "expected an accuracy result, got a sweep")
        return list(result.per_trial_accuracy)
    return parse_float_list(source)


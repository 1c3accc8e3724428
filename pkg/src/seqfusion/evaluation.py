"""Accuracy scoring, summary statistics, significance tests and benchmarks."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import EnvLabel, FusionTrace, Method, ScoreStream, normalize
from .fusion import FusionConfig, fuse_pipeline, smoother_init, viterbi_step

MIN_BENCH_STEPS = 10_000


@dataclass(frozen=True)
class AccuracyReport:
    per_trial_accuracy: tuple[float, ...]
    mean: float
    sd: float
    method: Method
    delay_frames: int
    delay_ms: float
    frame_rate_hz: float = 15.0


@dataclass(frozen=True)
class SweepPoint:
    method: Method
    window: int
    delay_frames: int
    mean: float
    sd: float


@dataclass(frozen=True)
class DelaySweep:
    """Accuracy against delay per method; slopes in percentage points per frame."""

    points: tuple[SweepPoint, ...]
    slopes: dict[Method, Optional[float]] = field(default_factory=dict)

    def for_method(self, method: Method | str) -> list[SweepPoint]:
        method = Method.parse(method)
        return [p for p in self.points if p.method is method]


def accuracy_with_delay(trace: FusionTrace, truth: Sequence[EnvLabel]) -> float:
    """Fraction of frames whose decision matches the truth at the same frame.

    The decision about frame k is compared with truth[k] no matter how late it
    became available; latency is reported separately via ``trace.delay_frames``.
    """
    if truth is None:
        raise ValueError("stream has no ground-truth labels to score against")
    if len(trace.decisions) != len(truth):
        raise ValueError(f"trace has {len(trace.decisions)} decisions for {len(truth)} truth labels")
    hits = sum(1 for d, y in zip(trace.decisions, truth) if d == y)
    return hits / len(truth)


def summarize(
    per_trial: Sequence[float], frame_rate_hz: float, delay_frames: int, method: Method | str
) -> AccuracyReport:
    if not per_trial:
        raise ValueError("nothing to summarize")
    values = tuple(float(x) for x in per_trial)
    mean = math.fsum(values) / len(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return AccuracyReport(
        per_trial_accuracy=values,
        mean=mean,
        sd=sd,
        method=Method.parse(method),
        delay_frames=delay_frames,
        delay_ms=delay_frames * 1000.0 / frame_rate_hz,
        frame_rate_hz=frame_rate_hz,
    )


def evaluate_session(
    session: Sequence[ScoreStream], method: Method | str, cfg: FusionConfig
) -> AccuracyReport:
    """Fuse and score every trial of a session with one pipeline."""
    method = Method.parse(method)
    accs = [accuracy_with_delay(fuse_pipeline(s, method, cfg), s.truth) for s in session]
    return summarize(accs, session[0].frame_rate_hz, method.delay_frames(cfg.l_v), method)


def group_means(values: Sequence[float], group_size: int) -> list[float]:
    """Average consecutive runs of ``group_size`` values (e.g. trials per subject)."""
    if group_size < 1 or len(values) % group_size:
        raise ValueError(f"{len(values)} values do not split into groups of {group_size}")
    return [
        math.fsum(values[i : i + group_size]) / group_size
        for i in range(0, len(values), group_size)
    ]


# -- Welch's t-test ---------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def welch_ttest(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sided Welch t-test; returns (t statistic, p-value)."""
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two values")
    na, nb = len(a), len(b)
    ma, mb = math.fsum(a) / na, math.fsum(b) / nb
    va, vb = statistics.variance(a), statistics.variance(b)
    se2 = va / na + vb / nb
    if not (math.isfinite(se2) and se2 > 0.0):
        raise ValueError("both samples have zero variance; the t statistic is undefined")
    t = (ma - mb) / math.sqrt(se2)
    df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = betainc_regularized(df / 2.0, 0.5, df / (df + t * t))
    return t, min(1.0, p)


# -- delay trade-off --------------------------------------------------------


def _ols_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    if len(set(xs)) < 2:
        return None
    return statistics.linear_regression(xs, ys).slope


def delay_sweep(
    session: Sequence[ScoreStream],
    cfg: FusionConfig,
    methods: Sequence[Method | str],
    voting_windows: Sequence[int],
) -> DelaySweep:
    """Accuracy as a function of decision delay.

    Voting pipelines are run once per full window ``w`` (half-width
    ``(w - 1) / 2``); CNN voting then waits ``(w - 1) / 2`` frames and HMM
    voting ``(w + 1) / 2``. Plain CNN and HMM contribute one point each.
    """
    for w in voting_windows:
        if w < 1 or w % 2 == 0:
            raise ValueError(f"voting windows must be odd and >= 1, got {w}")
    windows = sorted(set(voting_windows))
    points: list[SweepPoint] = []
    slopes: dict[Method, Optional[float]] = {}
    for method in (Method.parse(m) for m in methods):
        grid = windows if method.uses_voting else [1]
        mine = []
        for w in grid:
            run_cfg = replace(cfg, l_v=(w - 1) // 2)
            report = evaluate_session(session, method, run_cfg)
            mine.append(SweepPoint(method, w, report.delay_frames, report.mean, report.sd))
        mine.sort(key=lambda p: p.delay_frames)
        points.extend(mine)
        slopes[method] = _ols_slope(
            [p.delay_frames for p in mine], [100.0 * p.mean for p in mine]
        )
    return DelaySweep(tuple(points), slopes)


# -- timing -----------------------------------------------------------------


def timing_bench(
    n_steps: int, cfg: FusionConfig, seed: int, record: Optional[list] = None
) -> tuple[float, float]:
    """Median and 99th-percentile wall time of one ``viterbi_step``, in seconds.

    The random stream is drawn before timing starts. If ``record`` is given,
    the per-step decisions are appended to it.
    """
    if n_steps < MIN_BENCH_STEPS:
        raise ValueError(f"need at least {MIN_BENCH_STEPS} steps for stable percentiles, got {n_steps}")
    rng = np.random.default_rng(seed)
    raw = rng.dirichlet(np.ones(5), size=n_steps + cfg.l_w)
    frames = [normalize(row) for row in raw]
    state = smoother_init(frames[: cfg.l_w], cfg)
    durations = np.empty(n_steps, dtype=np.int64)
    clock = time.perf_counter_ns
    for k, emission in enumerate(frames[cfg.l_w :]):
        t0 = clock()
        decision, _, state = viterbi_step(state, emission, cfg)
        durations[k] = clock() - t0
        if record is not None:
            record.append(decision)
    median, p99 = np.percentile(durations, [50, 99])
    return float(median) * 1e-9, float(p99) * 1e-9

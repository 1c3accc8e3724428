"""Sequential decision fusion over per-frame classifier distributions.

The HMM filter keeps the last ``l_w`` smooth-state distributions. On each new
emission it averages that window, scores every candidate previous state
against the new emission through the transition prior, commits the best one
as the decision for the previous frame, and propagates a normalized
posterior for the current frame from the committed state alone.

Arithmetic sticks to plain floats with ``math.fsum`` for every reduction, so
results do not depend on summation order and are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (
    N_ENV,
    EnvLabel,
    FusionTrace,
    Method,
    ProbDist5,
    ScoreStream,
    argmax_label,
    normalize,
)
from .transition import TransitionMatrix, build_matrix

_RANGE = range(N_ENV)


@dataclass(frozen=True)
class FusionConfig:
    l_w: int = 5
    l_v: int = 1
    matrix: TransitionMatrix = field(default_factory=build_matrix)

    def __post_init__(self) -> None:
        if self.l_w < 1:
            raise ValueError(f"smoothing window must be >= 1, got {self.l_w}")
        if self.l_v < 0:
            raise ValueError(f"voting half-window must be >= 0, got {self.l_v}")
        if not self.matrix.is_stochastic():
            raise ValueError("transition matrix must be non-negative with rows summing to 1")


@dataclass(frozen=True)
class SmootherState:
    history: tuple[ProbDist5, ...]
    frame_index: int
    last_opt: Optional[EnvLabel] = None


def smoother_init(first_frames: Sequence[ProbDist5], cfg: FusionConfig) -> SmootherState:
    """Seed the window with raw emissions, which serve as the first smooth states."""
    if not first_frames:
        raise ValueError("smoother needs at least one frame to start")
    if len(first_frames) > cfg.l_w:
        raise ValueError(
            f"got {len(first_frames)} warm-up frames for a window of {cfg.l_w}; "
            "feed the rest through viterbi_step"
        )
    return SmootherState(tuple(first_frames), len(first_frames))


def viterbi_step(
    state: SmootherState, emission: ProbDist5, cfg: FusionConfig
) -> tuple[EnvLabel, ProbDist5, SmootherState]:
    """Consume frame t; return (decision for frame t-1, posterior for t, new state)."""
    if not isinstance(emission, ProbDist5):
        emission = normalize(emission)
    hist = state.history
    t = cfg.matrix.rows
    e = emission.p
    n = len(hist)

    mean_prev = [math.fsum([h.p[i] for h in hist]) / n for i in _RANGE]
    score_prev = [
        math.fsum([mean_prev[i] * t[i][j] * e[j] for j in _RANGE]) for i in _RANGE
    ]
    opt = argmax_label(score_prev, state.last_opt)
    k = opt.idx
    score_now = [mean_prev[k] * t[k][j] * e[j] for j in _RANGE]
    posterior = normalize(score_now)

    if n >= cfg.l_w:
        hist = hist[n - cfg.l_w + 1 :]
    new_state = SmootherState(hist + (posterior,), state.frame_index + 1, opt)
    return opt, posterior, new_state


def fuse_hmm(stream: ScoreStream, cfg: FusionConfig) -> FusionTrace:
    """Run the HMM filter over a whole stream.

    Frames before the window fills are decided by the argmax of their raw
    emission. The last frame has no successor, so its decision is the argmax
    of its own posterior.
    """
    frames = stream.frames
    decisions: list[EnvLabel] = []
    posteriors: list[ProbDist5] = []
    prev: Optional[EnvLabel] = None

    warm = min(cfg.l_w, len(frames))
    for f in frames[:warm]:
        prev = argmax_label(f.p, prev)
        decisions.append(prev)
        posteriors.append(f)

    if len(frames) > warm:
        # the first step revises the decision for the last warm-up frame
        decisions.pop()
        state = smoother_init(frames[:warm], cfg)
        for f in frames[warm:]:
            prev, post, state = viterbi_step(state, f, cfg)
            decisions.append(prev)
            posteriors.append(post)
        decisions.append(argmax_label(posteriors[-1].p, prev))

    return FusionTrace(tuple(decisions), tuple(posteriors), Method.HMM.delay_frames(cfg.l_v), Method.HMM)


def voting_filter(labels: Sequence[EnvLabel], l_v: int) -> list[EnvLabel]:
    """Centered mode filter of half-width ``l_v``, truncated at the stream ends.

    Ties keep the previous output when it is among the tied labels, otherwise
    the lowest label wins.
    """
    if not labels:
        raise ValueError("cannot vote over an empty label sequence")
    if l_v < 0:
        raise ValueError(f"voting half-window must be >= 0, got {l_v}")
    labels = [EnvLabel(x) for x in labels]
    if l_v == 0:
        return labels
    n = len(labels)
    counts = [0] * N_ENV
    for x in labels[: min(l_v, n)]:
        counts[x.idx] += 1
    out: list[EnvLabel] = []
    prev: Optional[EnvLabel] = None
    for k in range(n):
        if k + l_v < n:
            counts[labels[k + l_v].idx] += 1
        if k - l_v - 1 >= 0:
            counts[labels[k - l_v - 1].idx] -= 1
        prev = argmax_label(counts, prev)
        out.append(prev)
    return out


def fuse_pipeline(stream: ScoreStream, method: Method | str, cfg: FusionConfig) -> FusionTrace:
    method = Method.parse(method)
    if method.uses_hmm:
        base = fuse_hmm(stream, cfg)
        decisions, posteriors = list(base.decisions), base.posteriors
    else:
        decisions, posteriors = [], stream.frames
        prev = None
        for f in stream.frames:
            prev = argmax_label(f.p, prev)
            decisions.append(prev)
    if method.uses_voting:
        decisions = voting_filter(decisions, cfg.l_v)
    return FusionTrace(tuple(decisions), tuple(posteriors), method.delay_frames(cfg.l_v), method)

"""Synthetic labelled score streams standing in for recorded walking trials."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import N_ENV, EnvLabel, ScoreStream, normalize

# Dirichlet parameter of every wrong label; the true label gets this times
# the concentration.
BASE_ALPHA = 0.5
# Clean draws are raised to this power and renormalized, i.e. a softmax over
# log-gamma logits at inverse temperature SHARPNESS. Argmax is unchanged, but
# correct frames come out as confident as real classifier scores.
SHARPNESS = 4.0

DEFAULT_SEGMENTS: tuple[tuple[EnvLabel, int], ...] = (
    (EnvLabel.LG, 30),
    (EnvLabel.US, 20),
    (EnvLabel.LG, 30),
    (EnvLabel.DS, 20),
    (EnvLabel.LG, 30),
    (EnvLabel.UR, 20),
    (EnvLabel.DR, 20),
)


@dataclass(frozen=True)
class TrialScript:
    """Ordered (environment, duration in frames) segments of one trial."""

    segments: tuple[tuple[EnvLabel, int], ...] = DEFAULT_SEGMENTS
    frame_rate_hz: float = 15.0

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a trial script needs at least one segment")
        for label, duration in self.segments:
            EnvLabel(label)
            if duration < 1:
                raise ValueError(f"segment durations must be positive, got {duration}")
        if not self.frame_rate_hz > 0:
            raise ValueError("frame rate must be positive")

    def expand(self) -> tuple[EnvLabel, ...]:
        return tuple(EnvLabel(label) for label, d in self.segments for _ in range(d))

    @property
    def n_frames(self) -> int:
        return sum(d for _, d in self.segments)


@dataclass(frozen=True)
class NoiseModel:
    concentration: float = 8.0
    error_rate: float = 0.1
    error_bias: float = 0.6
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.concentration > 0:
            raise ValueError("concentration must be positive")
        if not 0.0 <= self.error_rate < 1.0:
            raise ValueError("error_rate must lie in [0, 1)")
        if not 0.0 < self.error_bias < 1.0:
            raise ValueError("error_bias must lie in (0, 1)")


PRESETS = {
    "indoor": NoiseModel(),
    "outdoor": NoiseModel(error_rate=0.2),
}


def generate_trial(script: TrialScript, noise: NoiseModel) -> ScoreStream:
    """Draw one stream of emissions for the expanded script.

    A clean frame is a Dirichlet draw whose true-label parameter is scaled by
    ``noise.concentration``, then sharpened by ``SHARPNESS``. With probability
    ``noise.error_rate`` the frame is instead an error emission:
    ``error_bias`` mass on one random wrong label and the remainder split
    evenly over the other four.
    """
    rng = np.random.default_rng(noise.seed)
    truth = script.expand()
    frames = []
    for label in truth:
        i = label.idx
        if rng.random() < noise.error_rate:
            wrong = int(rng.integers(N_ENV - 1))
            wrong += wrong >= i
            raw = np.full(N_ENV, (1.0 - noise.error_bias) / (N_ENV - 1))
            raw[wrong] = noise.error_bias
        else:
            alpha = np.full(N_ENV, BASE_ALPHA)
            alpha[i] *= noise.concentration
            raw = rng.dirichlet(alpha) ** SHARPNESS
        frames.append(normalize(raw))
    return ScoreStream(tuple(frames), truth, script.frame_rate_hz)


def generate_session(script: TrialScript, noise: NoiseModel, n_trials: int) -> list[ScoreStream]:
    """Independent trials seeded ``noise.seed + k`` for k in 0..n_trials-1."""
    if n_trials < 1:
        raise ValueError("need at least one trial")
    return [generate_trial(script, replace(noise, seed=noise.seed + k)) for k in range(n_trials)]

"""Domain types and simplex arithmetic shared by the fusion pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Optional, Sequence

EPSILON = 1e-9
SUM_TOLERANCE = 1e-9
N_ENV = 5


class InvalidDistributionError(ValueError):
    """Raised when a vector cannot be turned into a probability distribution."""


class EnvLabel(IntEnum):
    """Walking environments, numbered 1..5 everywhere (files, matrices, streams)."""

    LG = 1  # level ground
    US = 2  # up stairs
    DS = 3  # down stairs
    UR = 4  # up ramp
    DR = 5  # down ramp

    @property
    def idx(self) -> int:
        """Zero-based position in a distribution vector."""
        return self.value - 1

    @classmethod
    def parse(cls, token: str | int) -> "EnvLabel":
        """Accept ``2``, ``"2"`` or ``"US"`` (case-insensitive)."""
        if isinstance(token, int):
            return cls(token)
        token = token.strip()
        if token.isdigit():
            return cls(int(token))
        try:
            return cls[token.upper()]
        except KeyError:
            raise ValueError(f"unknown environment label {token!r}") from None


@dataclass(frozen=True)
class ProbDist5:
    """A strictly positive point on the 5-category simplex."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.p) != N_ENV:
            raise InvalidDistributionError(f"expected {N_ENV} components, got {len(self.p)}")
        if min(self.p) < EPSILON or abs(math.fsum(self.p) - 1.0) > SUM_TOLERANCE:
            raise InvalidDistributionError(f"not a clamped distribution: {self.p}")

    def __getitem__(self, i: int) -> float:
        return self.p[i]

    def __iter__(self):
        return iter(self.p)

    def __len__(self) -> int:
        return N_ENV

    @classmethod
    def one_hot(cls, label: EnvLabel | int) -> "ProbDist5":
        raw = [0.0] * N_ENV
        raw[EnvLabel(label).idx] = 1.0
        return normalize(raw)

    @classmethod
    def uniform(cls) -> "ProbDist5":
        return cls((0.2,) * N_ENV)


def normalize(raw: Iterable[float]) -> ProbDist5:
    """Rescale ``raw`` onto the simplex with every component at least ``EPSILON``.

    Components that fall below ``EPSILON`` after rescaling are pinned to it and
    the remaining mass is shrunk proportionally, repeating until stable, so
    the result sums to one and no component is under the floor.
    """
    values = [float(x) for x in raw]
    if len(values) != N_ENV:
        raise InvalidDistributionError(f"expected {N_ENV} components, got {len(values)}")
    for x in values:
        if not math.isfinite(x) or x < 0.0:
            raise InvalidDistributionError(f"components must be finite and non-negative: {values}")
    total = math.fsum(values)
    if total <= 0.0:
        raise InvalidDistributionError("all components are zero")
    q = [x / total for x in values]
    pinned = [False] * N_ENV
    while True:
        newly = [i for i in range(N_ENV) if not pinned[i] and q[i] < EPSILON]
        if not newly:
            break
        for i in newly:
            pinned[i] = True
        free = [i for i in range(N_ENV) if not pinned[i]]
        free_mass = math.fsum(q[i] for i in free)
        scale = (1.0 - EPSILON * (N_ENV - len(free))) / free_mass
        for i in range(N_ENV):
            q[i] = EPSILON if pinned[i] else q[i] * scale
    return ProbDist5(tuple(q))


def argmax_label(d: Sequence[float], previous: Optional[EnvLabel] = None) -> EnvLabel:
    """Label of the largest component.

    Ties go to ``previous`` when it is among the tied labels, otherwise to the
    lowest index. Works on unnormalized score vectors too.
    """
    best = max(d)
    if previous is not None and d[previous.idx] == best:
        return previous
    for i, x in enumerate(d):
        if x == best:
            return EnvLabel(i + 1)
    raise InvalidDistributionError(f"no maximum in {d!r}")


class Method(str, Enum):
    """Fusion pipelines compared in the benchmark."""

    CNN = "CNN"
    CNN_VOTING = "CNN+Voting"
    HMM = "HMM"
    HMM_VOTING = "HMM+Voting"

    @property
    def slug(self) -> str:
        return self.value.lower().replace("+", "-")

    @property
    def uses_voting(self) -> bool:
        return self in (Method.CNN_VOTING, Method.HMM_VOTING)

    @property
    def uses_hmm(self) -> bool:
        return self in (Method.HMM, Method.HMM_VOTING)

    def delay_frames(self, l_v: int) -> int:
        """Frames that must arrive after frame k before its decision is final."""
        return (1 if self.uses_hmm else 0) + (l_v if self.uses_voting else 0)

    @classmethod
    def parse(cls, name: str | "Method") -> "Method":
        if isinstance(name, Method):
            return name
        for m in cls:
            if name in (m.value, m.slug, m.name):
                return m
        raise ValueError(f"unknown method {name!r}; expected one of {[m.slug for m in cls]}")


@dataclass(frozen=True)
class ScoreStream:
    """Per-frame classifier scores, optionally with ground-truth labels."""

    frames: tuple[ProbDist5, ...]
    truth: Optional[tuple[EnvLabel, ...]] = None
    frame_rate_hz: float = 15.0

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValueError("a score stream needs at least one frame")
        if self.truth is not None and len(self.truth) != len(self.frames):
            raise ValueError(f"truth has {len(self.truth)} labels for {len(self.frames)} frames")
        if not self.frame_rate_hz > 0:
            raise ValueError(f"frame rate must be positive, got {self.frame_rate_hz}")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class FusionTrace:
    """Fused output of one pipeline over one stream.

    ``decisions[k]`` is the decision about frame k; it becomes available
    ``delay_frames`` frames later.
    """

    decisions: tuple[EnvLabel, ...]
    posteriors: tuple[ProbDist5, ...]
    delay_frames: int
    method: Method

    def __post_init__(self) -> None:
        if len(self.decisions) != len(self.posteriors):
            raise ValueError("decisions and posteriors differ in length")
        if self.delay_frames < 0:
            raise ValueError("delay cannot be negative")

    def __len__(self) -> int:
        return len(self.decisions)

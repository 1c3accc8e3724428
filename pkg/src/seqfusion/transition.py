"""Hand-designed 5x5 transition prior over environment switches.

The matrix follows six structural rules:

1. staying put is more likely than any switch;
2. the stay probability is the same for every environment;
3. leaving level ground is equally likely towards every other environment;
4. returning to level ground is equally likely from every other environment;
5. switches among same-direction environments (US<->UR, DS<->DR, even index
   gap) share one low probability;
6. switches between upward and downward environments (odd index gap) share
   the lowest probability in the matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import N_ENV

ROW_SUM_TOLERANCE = 1e-12


class InvalidParametersError(ValueError):
    """Raised when rule parameters cannot produce a rule-consistent matrix."""


@dataclass(frozen=True)
class TransitionRuleParams:
    p_stay: float = 0.9
    p_even: float = 0.01
    p_odd: float = 0.005

    @property
    def lg_exit(self) -> float:
        """Probability of leaving level ground towards one given environment."""
        return (1.0 - self.p_stay) / 4.0

    @property
    def to_lg(self) -> float:
        """Probability of returning to level ground; the row residual."""
        return 1.0 - self.p_stay - self.p_even - 2.0 * self.p_odd

    def check(self) -> None:
        ps, pe, po = self.p_stay, self.p_even, self.p_odd
        if not all(math.isfinite(x) for x in (ps, pe, po)):
            raise InvalidParametersError(f"non-finite parameters: {self}")
        if not (ps > pe > po > 0.0):
            raise InvalidParametersError(f"need p_stay > p_even > p_odd > 0, got {self}")
        if not self.to_lg > 0.0:
            raise InvalidParametersError(
                f"p_stay + p_even + 2*p_odd must stay below 1 (to-LG residual {self.to_lg})"
            )
        if not self.lg_exit > pe:
            raise InvalidParametersError(
                f"level-ground exit probability {self.lg_exit} must exceed p_even {pe}"
            )
        if not (ps > self.to_lg and ps > self.lg_exit):
            raise InvalidParametersError(f"p_stay {ps} must dominate every switch probability")


@dataclass(frozen=True)
class TransitionMatrix:
    """``rows[i][j]``: probability of moving from environment i+1 to j+1."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != N_ENV or any(len(r) != N_ENV for r in self.rows):
            raise ValueError(f"transition matrix must be {N_ENV}x{N_ENV}")
        if not all(math.isfinite(x) for r in self.rows for x in r):
            raise ValueError("transition matrix entries must be finite")

    def __getitem__(self, i: int) -> tuple[float, ...]:
        return self.rows[i]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "TransitionMatrix":
        return cls(tuple(tuple(float(x) for x in r) for r in rows))

    @classmethod
    def uniform(cls) -> "TransitionMatrix":
        return cls(((1.0 / N_ENV,) * N_ENV,) * N_ENV)

    def is_stochastic(self, tol: float = 1e-9) -> bool:
        return all(
            min(r) >= 0.0 and abs(math.fsum(r) - 1.0) <= tol for r in self.rows
        )


def build_matrix(params: TransitionRuleParams = TransitionRuleParams()) -> TransitionMatrix:
    params.check()
    exit_lg = params.lg_exit
    rows = [(params.p_stay, exit_lg, exit_lg, exit_lg, exit_lg)]
    for i in range(1, N_ENV):
        row = [params.to_lg]
        for j in range(1, N_ENV):
            if i == j:
                row.append(params.p_stay)
            elif (i - j) % 2 == 0:
                row.append(params.p_even)
            else:
                row.append(params.p_odd)
        rows.append(tuple(row))
    return TransitionMatrix(tuple(rows))


@dataclass(frozen=True)
class RuleViolation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


RULES = (
    "row-sum",
    "positivity",
    "diagonal-max",
    "diagonal-equal",
    "lg-row-equal",
    "lg-column-equal",
    "even-gap-equal",
    "odd-gap-equal",
    "odd-gap-min",
)


def _spread(values: list[float]) -> float:
    return max(values) - min(values)


def validate_rules(m: TransitionMatrix | Sequence[Sequence[float]]) -> list[RuleViolation]:
    """Check a matrix against the structural rules; one record per broken rule.

    Equalities are exact: the builder produces bit-equal entries, and a
    hand-written matrix that only approximately honours a rule is reported.
    """
    t = m.rows if isinstance(m, TransitionMatrix) else TransitionMatrix.from_rows(m).rows
    out: list[RuleViolation] = []
    idx = range(N_ENV)

    bad_rows = [i + 1 for i in idx if abs(math.fsum(t[i]) - 1.0) > ROW_SUM_TOLERANCE]
    if bad_rows:
        out.append(RuleViolation("row-sum", f"rows {bad_rows} do not sum to 1"))

    nonpos = [(i + 1, j + 1) for i in idx for j in idx if not t[i][j] > 0.0]
    if nonpos:
        out.append(RuleViolation("positivity", f"non-positive entries at {nonpos}"))

    weak_rows = [i + 1 for i in idx if any(t[i][j] >= t[i][i] for j in idx if j != i)]
    if weak_rows:
        out.append(RuleViolation("diagonal-max", f"diagonal not the strict row maximum in rows {weak_rows}"))

    diag = [t[i][i] for i in idx]
    if _spread(diag) != 0.0:
        out.append(RuleViolation("diagonal-equal", f"diagonal entries differ: {diag}"))

    lg_row = [t[0][j] for j in range(1, N_ENV)]
    if _spread(lg_row) != 0.0:
        out.append(RuleViolation("lg-row-equal", f"level-ground exits differ: {lg_row}"))

    lg_col = [t[i][0] for i in range(1, N_ENV)]
    if _spread(lg_col) != 0.0:
        out.append(RuleViolation("lg-column-equal", f"returns to level ground differ: {lg_col}"))

    pairs = [(i, j) for i in range(1, N_ENV) for j in range(1, N_ENV) if i != j]
    even = [t[i][j] for i, j in pairs if (i - j) % 2 == 0]
    odd = [t[i][j] for i, j in pairs if (i - j) % 2 == 1]
    if _spread(even) != 0.0:
        out.append(RuleViolation("even-gap-equal", f"same-direction switches differ: {even}"))
    if _spread(odd) != 0.0:
        out.append(RuleViolation("odd-gap-equal", f"cross-direction switches differ: {odd}"))

    odd_cells = {(i, j) for i, j in pairs if (i - j) % 2 == 1}
    others = [t[i][j] for i in idx for j in idx if (i, j) not in odd_cells]
    if not max(odd) < min(others):
        out.append(RuleViolation("odd-gap-min", "cross-direction switches are not strictly the smallest entries"))
    return out


def format_matrix(m: TransitionMatrix) -> str:
    """Five lines of five space-separated decimals, exact round-trip precision."""
    return "".join(" ".join(repr(float(x)) for x in row) + "\n" for row in m.rows)


def parse_matrix(text: str) -> TransitionMatrix:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError:
            raise ValueError(f"line {lineno}: not a row of numbers: {line!r}") from None
    return TransitionMatrix.from_rows(rows)


def write_matrix(m: TransitionMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(m))


def read_matrix(path: str | Path) -> TransitionMatrix:
    return parse_matrix(Path(path).read_text())

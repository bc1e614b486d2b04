"""Pretest/posttest statistics: t tests and covariate-adjusted group means.

The three tests mirror a classroom study pipeline: a pooled two-sample t
test of treatment versus placebo posttest scores, an ANCOVA-style F test on
the group factor with the pretest as covariate (reporting each group's
estimated marginal mean at the grand pretest mean), and a correlation t
test of test scores against school grades.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .special import f_sf, t_two_sided_p

MAX_SCORE = 54.0


class Group(enum.Enum):
    A = "A"  # theory + hands-on
    B = "B"  # theory only
    P = "P"  # self-research placebo


class Cohort(enum.Enum):
    LAST = "last"
    PRELAST = "prelast"
    THIRD_LAST = "third_last"


class StatsError(ValueError):
    """Degenerate or malformed statistical input."""


@dataclass(frozen=True)
class AssessmentRecord:
    """One student's pretest/posttest pair with group and cohort labels."""

    student_id: str
    group: Group
    cohort: Cohort
    pretest: float
    posttest: float
    grade: float | None = None

    def __post_init__(self) -> None:
        for name, score in (("pretest", self.pretest), ("posttest", self.posttest)):
            if not 0.0 <= score <= MAX_SCORE:
                raise StatsError(f"{name} score {score} outside [0, {MAX_SCORE}]")


@dataclass(frozen=True)
class TestReport:
    """Result of one statistical test, JSON-friendly for the CLI."""

    kind: str
    df: float | tuple[float, float]
    statistic: float
    p: float
    mean_difference: float | None = None
    adjusted_means: dict[str, float] = field(default_factory=dict)
    group_means: dict[str, float] = field(default_factory=dict)
    cor: float | None = None

    def to_json(self) -> dict:
        out: dict = {
            "kind": self.kind,
            "df": list(self.df) if isinstance(self.df, tuple) else self.df,
            "statistic": self.statistic,
            "p": self.p,
        }
        if self.mean_difference is not None:
            out["mean_difference"] = self.mean_difference
        if self.adjusted_means:
            out["adjusted_means"] = self.adjusted_means
        if self.group_means:
            out["group_means"] = self.group_means
        if self.cor is not None:
            out["cor"] = self.cor
        return out


def two_sample_t(sample1: Sequence[float], sample2: Sequence[float]) -> TestReport:
    """Pooled-variance (Student) two-sample t test, two-sided.

    df = n1 + n2 - 2. Requires at least two values per sample and a nonzero
    pooled variance.
    """
    x = np.asarray(sample1, dtype=float)
    y = np.asarray(sample2, dtype=float)
    n1, n2 = len(x), len(y)
    if n1 < 2 or n2 < 2:
        raise StatsError("each sample needs at least 2 values")
    df = n1 + n2 - 2
    pooled_var = ((n1 - 1) * x.var(ddof=1) + (n2 - 1) * y.var(ddof=1)) / df
    if pooled_var <= 0.0:
        raise StatsError("pooled variance is zero")
    diff = float(x.mean() - y.mean())
    t = diff / math.sqrt(pooled_var * (1.0 / n1 + 1.0 / n2))
    return TestReport(
        kind="two_sample_t",
        df=float(df),
        statistic=t,
        p=t_two_sided_p(t, df),
        mean_difference=diff,
    )


def ancova(records: Sequence[AssessmentRecord]) -> TestReport:
    """F test on the group factor after adjusting posttests by the pretest.

    Fits posttest ~ group + pretest by least squares and compares it against
    the covariate-only model. Adjusted (estimated marginal) means are the
    fitted group predictions at the grand mean of the pretest.
    """
    if not records:
        raise StatsError("no records")
    groups = sorted({r.group for r in records}, key=lambda g: g.value)
    if len(groups) < 2:
        raise StatsError("need at least 2 groups")
    counts = {g: sum(1 for r in records if r.group == g) for g in groups}
    small = [g.value for g, c in counts.items() if c < 2]
    if small:
        raise StatsError(f"groups with fewer than 2 records: {', '.join(small)}")

    y1 = np.array([r.pretest for r in records])
    y2 = np.array([r.posttest for r in records])
    if y1.var(ddof=1) <= 0.0:
        raise StatsError("pretest has zero variance")

    n = len(records)
    g = len(groups)
    # Dummy coding with the first group as reference: intercept, g-1 dummies, covariate.
    design = np.ones((n, g + 1))
    for col, group in enumerate(groups[1:], start=1):
        design[:, col] = [1.0 if r.group == group else 0.0 for r in records]
    design[:, g] = y1

    rank = np.linalg.matrix_rank(design)
    if rank < g + 1:
        raise StatsError(
            "rank-deficient design: group factor and pretest covariate are collinear"
        )
    if n <= g + 1:
        raise StatsError("not enough records for the residual degrees of freedom")

    beta, _, _, _ = np.linalg.lstsq(design, y2, rcond=None)
    rss_full = float(np.sum((y2 - design @ beta) ** 2))

    reduced = np.column_stack([np.ones(n), y1])
    beta_r, _, _, _ = np.linalg.lstsq(reduced, y2, rcond=None)
    rss_reduced = float(np.sum((y2 - reduced @ beta_r) ** 2))

    df1 = g - 1
    df2 = n - g - 1
    if rss_full <= 1e-12:
        f_stat = math.inf
        p = 0.0
    else:
        f_stat = ((rss_reduced - rss_full) / df1) / (rss_full / df2)
        p = f_sf(f_stat, df1, df2)

    grand_pre = float(y1.mean())
    adjusted = {}
    raw = {}
    for col, group in enumerate(groups):
        effect = 0.0 if col == 0 else float(beta[col])
        adjusted[group.value] = float(beta[0]) + effect + float(beta[g]) * grand_pre
        raw[group.value] = float(np.mean([r.posttest for r in records if r.group == group]))
    return TestReport(
        kind="ancova",
        df=(float(df1), float(df2)),
        statistic=f_stat,
        p=p,
        adjusted_means=adjusted,
        group_means=raw,
    )


def correlation_t(x: Sequence[float], y: Sequence[float]) -> TestReport:
    """Pearson correlation with the t test t = r * sqrt(n-2) / sqrt(1-r^2).

    df = n - 2, two-sided p. A perfect correlation is reported with an
    infinite statistic and p = 0.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if len(xs) != len(ys):
        raise StatsError("samples differ in length")
    n = len(xs)
    if n < 3:
        raise StatsError("need at least 3 paired values")
    if xs.var(ddof=1) <= 0.0 or ys.var(ddof=1) <= 0.0:
        raise StatsError("an input vector is constant")

    xc = xs - xs.mean()
    yc = ys - ys.mean()
    r = float(np.dot(xc, yc) / math.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) >= 1.0 - 1e-15:
        t = math.copysign(math.inf, r)
        p = 0.0
    else:
        t = r * math.sqrt(df) / math.sqrt(1.0 - r * r)
        p = t_two_sided_p(t, df)
    return TestReport(kind="correlation_t", df=float(df), statistic=t, p=p, cor=r)

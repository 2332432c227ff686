"""Regression analysis linking behavioral metrics to teamwork ratings.

The analysis family is fixed up front: for each cohort (all agents, and all
agents excluding the uniform-random baseline) one simple linear regression of
teamwork rating on each linear metric, plus one parabolic fit of rating on
interaction coupling (the coupling hypothesis is an interior optimum, not a
monotone trend). Significance thresholds are Bonferroni-corrected by the
total number of linear fits in the family, counting planned fits whether or
not enough data points survived applicability filtering.

Teamwork ratings aggregate the six behavior-rating items (B3..B8) of the
post-game questionnaire; the default coding gives each item 0..6 so the sum
spans 0..36. Both the item range and the sum range are recorded so exported
numbers are interpretable without the instrument at hand.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats as _scipy_stats

from .metrics import METRIC_KEYS, MetricReport

LINEAR_METRIC_KEYS = (
    "self_play",
    "intra_xp",
    "inter_xp",
    "context_independence",
    "action_entropy",
    "response_entropy",
    "discard_playable",
    "play_unplayable",
    "play_playable",
)
PARABOLA_METRIC_KEY = "interaction_coupling"
COHORTS = ("all", "no-random")

assert set(LINEAR_METRIC_KEYS) | {PARABOLA_METRIC_KEY} == set(METRIC_KEYS)


@dataclass(frozen=True)
class RegressionResult:
    label: str
    n: int
    slope: float = float("nan")
    intercept: float = float("nan")
    r: float = float("nan")
    r_squared: float = float("nan")
    t_stat: float = float("nan")
    p_value: float = float("nan")
    stderr: float = float("nan")
    applicable: bool = True

    @classmethod
    def not_applicable(cls, label: str, n: int = 0) -> "RegressionResult":
        return cls(label=label, n=n, applicable=False)


def linear_regression(x, y, label: str = "") -> RegressionResult:
    """Least-squares line with the usual t-test for nonzero slope.

    t = r * sqrt((n-2) / (1-r^2)), p two-sided from Student's t with n-2
    degrees of freedom. Needs n >= 3 and non-constant x and y.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be equal-length 1-D sequences")
    n = len(xs)
    if n < 3:
        return RegressionResult.not_applicable(label, n)
    xbar, ybar = xs.mean(), ys.mean()
    sxx = float(((xs - xbar) ** 2).sum())
    syy = float(((ys - ybar) ** 2).sum())
    sxy = float(((xs - xbar) * (ys - ybar)).sum())
    if sxx <= 0 or syy <= 0:
        return RegressionResult.not_applicable(label, n)
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    r_squared = r * r
    df = n - 2
    resid_var = (syy - slope * sxy) / df
    stderr = math.sqrt(max(resid_var, 0.0) / sxx)
    if r_squared >= 1.0:
        t_stat, p_value = math.inf if slope > 0 else -math.inf, 0.0
    else:
        t_stat = r * math.sqrt(df / (1.0 - r_squared))
        p_value = 2.0 * float(_scipy_stats.t.sf(abs(t_stat), df))
    return RegressionResult(
        label=label,
        n=n,
        slope=slope,
        intercept=intercept,
        r=r,
        r_squared=r_squared,
        t_stat=t_stat,
        p_value=p_value,
        stderr=stderr,
    )


def bonferroni_threshold(alpha: float, n_tests: int) -> float:
    """Per-test significance level alpha / n_tests."""
    if n_tests <= 0:
        raise ValueError("n_tests must be positive")
    return alpha / n_tests


@dataclass(frozen=True)
class ParabolaFit:
    """Least-squares y = a*(x + b)^2 + c.

    Fit is unconstrained (plain quadratic least squares, re-parameterized);
    the coupling hypothesis expects a concave shape (a < 0), so a >= 0 is
    reported via constraint_violated rather than forced.
    """

    label: str
    n: int
    a: float = float("nan")
    b: float = float("nan")
    c: float = float("nan")
    r_squared: float = float("nan")
    constraint_violated: bool = False
    applicable: bool = True

    @property
    def vertex_x(self) -> float:
        return -self.b

    @property
    def vertex_y(self) -> float:
        return self.c

    def predict(self, x: float) -> float:
        return self.a * (x + self.b) ** 2 + self.c

    @classmethod
    def not_applicable(cls, label: str, n: int = 0) -> "ParabolaFit":
        return cls(label=label, n=n, applicable=False)


def parabolic_fit(x, y, label: str = "") -> ParabolaFit:
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be equal-length 1-D sequences")
    n = len(xs)
    if n < 3 or len(np.unique(xs)) < 3:
        return ParabolaFit.not_applicable(label, n)
    design = np.column_stack([xs * xs, xs, np.ones(n)])
    coeffs, *_ = np.linalg.lstsq(design, ys, rcond=None)
    qa, qb, qc = (float(v) for v in coeffs)
    if qa == 0.0:
        return ParabolaFit.not_applicable(label, n)
    b = qb / (2.0 * qa)
    c = qc - qb * qb / (4.0 * qa)
    resid = ys - design @ coeffs
    ss_res = float((resid**2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r_squared = float("nan") if ss_tot <= 0 else 1.0 - ss_res / ss_tot
    return ParabolaFit(
        label=label,
        n=n,
        a=qa,
        b=b,
        c=c,
        r_squared=r_squared,
        constraint_violated=qa >= 0.0,
    )


# -- teamwork ratings ---------------------------------------------------------


@dataclass(frozen=True)
class RatingScale:
    """Coding of the six behavior-rating questionnaire items."""

    n_items: int = 6
    min_code: int = 0
    max_code: int = 6

    @property
    def rating_range(self) -> tuple[int, int]:
        return (self.n_items * self.min_code, self.n_items * self.max_code)


def teamwork_rating(item_codes, scale: RatingScale = RatingScale()) -> int:
    """Sum of the coded behavior-rating items."""
    codes = list(item_codes)
    if len(codes) != scale.n_items:
        raise ValueError(f"expected {scale.n_items} item codes, got {len(codes)}")
    for code in codes:
        if not (scale.min_code <= code <= scale.max_code):
            raise ValueError(f"item code {code} outside [{scale.min_code}, {scale.max_code}]")
    return int(sum(codes))


def synthetic_ratings(
    xs, slope: float, intercept: float, noise_std: float, seed: int
) -> list[float]:
    """Planted linear ratings y = slope*x + intercept + N(0, noise_std)."""
    rng = np.random.default_rng(seed)
    return [
        float(slope * x + intercept + rng.normal(0.0, noise_std)) for x in xs
    ]


# -- cohort analysis -----------------------------------------------------------


@dataclass
class CohortAnalysis:
    cohort: str
    agent_names: list[str]
    linear: list[RegressionResult]
    coupling_parabola: ParabolaFit

    def fit(self, label: str) -> RegressionResult:
        for row in self.linear:
            if row.label == label:
                return row
        raise KeyError(label)


@dataclass
class AnalysisReport:
    cohorts: list[CohortAnalysis]
    alpha: float
    family_size: int
    bonferroni_alpha: float
    notes: dict = field(default_factory=dict)

    def cohort(self, name: str) -> CohortAnalysis:
        for c in self.cohorts:
            if c.cohort == name:
                return c
        raise KeyError(name)


def _cohort_points(
    report: MetricReport, ratings: dict[str, float], cohort: str, key: str
) -> tuple[list[float], list[float], list[str]]:
    xs, ys, names = [], [], []
    for agent in report.agents:
        if cohort == "no-random" and agent.algo == "random":
            continue
        if agent.name not in ratings:
            continue
        summary = agent.metric(key)
        if not summary.applicable or math.isnan(summary.mean):
            continue
        xs.append(summary.mean)
        ys.append(float(ratings[agent.name]))
        names.append(agent.name)
    return xs, ys, names


def analyze_cohorts(
    report: MetricReport,
    ratings: dict[str, float],
    alpha: float = 0.05,
    cohorts: tuple[str, ...] = COHORTS,
) -> AnalysisReport:
    """Run the fixed regression family against per-agent teamwork ratings.

    `ratings` maps behavior name -> rating. Agents missing a rating or an
    applicable metric value drop out of the affected fit; fits left with
    fewer than 3 points are reported as not applicable but still count
    toward the Bonferroni family size.
    """
    family_size = len(LINEAR_METRIC_KEYS) * len(cohorts)
    results = []
    for cohort in cohorts:
        linear = []
        for key in LINEAR_METRIC_KEYS:
            xs, ys, _ = _cohort_points(report, ratings, cohort, key)
            linear.append(linear_regression(xs, ys, label=key))
        xs, ys, names = _cohort_points(report, ratings, cohort, PARABOLA_METRIC_KEY)
        parabola = parabolic_fit(xs, ys, label=PARABOLA_METRIC_KEY)
        cohort_names = sorted(
            {
                a.name
                for a in report.agents
                if a.name in ratings and not (cohort == "no-random" and a.algo == "random")
            }
        )
        results.append(
            CohortAnalysis(
                cohort=cohort,
                agent_names=cohort_names,
                linear=linear,
                coupling_parabola=parabola,
            )
        )
    return AnalysisReport(
        cohorts=results,
        alpha=alpha,
        family_size=family_size,
        bonferroni_alpha=bonferroni_threshold(alpha, family_size),
    )


ANALYSIS_CSV_HEADER = (
    "cohort",
    "metric",
    "fit",
    "n",
    "applicable",
    "slope",
    "intercept",
    "r",
    "r_squared",
    "t_stat",
    "p_value",
    "stderr",
    "significant_bonferroni",
    "a",
    "b",
    "c",
    "constraint_violated",
)


def write_analysis_csv(analysis: AnalysisReport, path: str | Path) -> None:
    """One row per planned fit: every linear fit plus each cohort's parabola."""

    def cell(value: float) -> str:
        if isinstance(value, float) and math.isnan(value):
            return "n/a"
        return f"{value:.6g}"

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ANALYSIS_CSV_HEADER)
        for cohort in analysis.cohorts:
            for row in cohort.linear:
                significant = (
                    row.applicable and row.p_value < analysis.bonferroni_alpha
                )
                writer.writerow(
                    [
                        cohort.cohort,
                        row.label,
                        "linear",
                        row.n,
                        "yes" if row.applicable else "no",
                        cell(row.slope),
                        cell(row.intercept),
                        cell(row.r),
                        cell(row.r_squared),
                        cell(row.t_stat),
                        cell(row.p_value),
                        cell(row.stderr),
                        "yes" if significant else "no",
                        "",
                        "",
                        "",
                        "",
                    ]
                )
            para = cohort.coupling_parabola
            writer.writerow(
                [
                    cohort.cohort,
                    para.label,
                    "parabola",
                    para.n,
                    "yes" if para.applicable else "no",
                    "",
                    "",
                    "",
                    cell(para.r_squared),
                    "",
                    "",
                    "",
                    "",
                    cell(para.a),
                    cell(para.b),
                    cell(para.c),
                    "yes" if para.constraint_violated else "no",
                ]
            )

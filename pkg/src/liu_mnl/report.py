"""Fit reports: MLE and Liu estimates side by side, one block per response level."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .irls import MleFit, fit_mle, mle_covariance, mle_scalar_mse
from .linalg import condition_number
from .liu import RULES, liu_estimate, liu_moments, liu_scalar_mse, parse_rule, select_d, spectral_summary
from .model import Dataset, log_likelihood, softmax_probabilities

PLUG_IN_NOTE = (
    "Liu covariance, bias and scalar MSE are plug-in estimates: the MLE stands in "
    "for the unknown true coefficients and the eigenvalues of X'W_jX at the MLE are used."
)


@dataclass
class EstimateBlock:
    coefficients: list[float]
    standard_errors: list[float]
    scalar_mse: float
    d: float | None = None


@dataclass
class CategoryReport:
    level: str
    eigenvalues: list[float]
    condition_number: float
    d: dict[str, float]
    estimates: dict[str, EstimateBlock]


@dataclass
class FitReport:
    response: str
    reference: str
    levels: list[str]
    columns: list[str]
    intercept: bool
    n: int
    estimator: str
    d_rule: str | None
    selected: str
    converged: bool
    iterations: int
    final_delta: float
    tol: float
    max_iter: int
    log_likelihood: float
    categories: list[CategoryReport]
    total_mse: dict[str, float]
    notes: list[str] = field(default_factory=list)

    def coefficients(self, name: str | None = None) -> np.ndarray:
        """(m-1) x q coefficients of estimator `name` (default: the selected one)."""
        name = name or self.selected
        return np.array([c.estimates[name].coefficients for c in self.categories])

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        d = dict(d)
        d["categories"] = [
            CategoryReport(
                **{
                    **c,
                    "estimates": {k: EstimateBlock(**v) for k, v in c["estimates"].items()},
                }
            )
            for c in d["categories"]
        ]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "FitReport":
        return cls.from_dict(json.loads(text))


def _floats(a) -> list[float]:
    return [float(v) for v in np.ravel(a)]


def build_report(
    data: Dataset,
    fit: MleFit,
    estimator: str = "mle",
    d_rule: str | None = None,
    response: str = "y",
    intercept: bool = False,
    max_iter: int = 100,
) -> FitReport:
    """Assemble the report for a fitted MLE.

    Every category always carries the MLE block and the three data-driven
    Liu blocks (d1, d2, d3); a ``fixed:<v>`` rule adds one more block.
    `selected` names the block requested through `estimator` / `d_rule`.
    """
    if estimator not in ("mle", "liu"):
        raise ValueError(f"unknown estimator {estimator!r}")
    rule_name, fixed = parse_rule(d_rule or "d3") if estimator == "liu" else (None, None)
    if estimator == "liu":
        selected = rule_name if fixed is None else f"fixed:{fixed!r}"
    else:
        selected = "MLE"

    covs = mle_covariance(fit, require_converged=False)
    categories = []
    for j, (C, b) in enumerate(zip(fit.weighted_crossprods, fit.coeffs.betas)):
        summary = spectral_summary(C, b)
        lam, alpha = summary.eigenvalues, summary.alpha
        ds = {rule: select_d(summary, rule) for rule in RULES}
        if fixed is not None:
            ds[selected] = fixed
        blocks = {
            "MLE": EstimateBlock(
                coefficients=_floats(b),
                standard_errors=_floats(np.sqrt(np.diag(covs[j]))),
                scalar_mse=mle_scalar_mse(lam),
            )
        }
        for name, d in ds.items():
            moments = liu_moments(C, d, b)
            blocks[name] = EstimateBlock(
                coefficients=_floats(liu_estimate(b, C, d)),
                standard_errors=_floats(np.sqrt(np.diag(moments.covariance))),
                scalar_mse=liu_scalar_mse(lam, alpha, d),
                d=float(d),
            )
        categories.append(
            CategoryReport(
                level=data.levels[j],
                eigenvalues=_floats(lam),
                condition_number=condition_number(C),
                d={k: float(v) for k, v in ds.items()},
                estimates=blocks,
            )
        )
    names = list(categories[0].estimates) if categories else []
    total = {name: float(sum(c.estimates[name].scalar_mse for c in categories)) for name in names}
    pi = softmax_probabilities(data.X, fit.coeffs)
    return FitReport(
        response=response,
        reference=data.reference,
        levels=list(data.levels),
        columns=list(data.columns),
        intercept=intercept,
        n=data.n,
        estimator=estimator,
        d_rule=None if estimator == "mle" else selected,
        selected=selected,
        converged=fit.converged,
        iterations=fit.iterations,
        final_delta=float(fit.final_delta),
        tol=float(fit.tol),
        max_iter=int(max_iter),
        log_likelihood=log_likelihood(pi, data.codes),
        categories=categories,
        total_mse=total,
        notes=[PLUG_IN_NOTE],
    )


def fit_report(data: Dataset, estimator="mle", d_rule=None, tol=1e-6, max_iter=100, response="y", intercept=False):
    fit = fit_mle(data, max_iter=max_iter, tol=tol)
    return build_report(data, fit, estimator, d_rule, response=response, intercept=intercept, max_iter=max_iter)


def format_report(report: FitReport, digits: int = 4) -> str:
    """Plain-text table in the layout 'coefficient (standard error)' per estimator."""
    lines = []
    status = "converged" if report.converged else "NOT converged"
    lines.append(
        f"Multinomial logit, n={report.n}, reference level {report.reference!r}, "
        f"{status} after {report.iterations} iterations (max change {report.final_delta:.3g})"
    )
    lines.append(f"log-likelihood {report.log_likelihood:.{digits}f}; selected estimator: {report.selected}")
    for cat in report.categories:
        names = list(cat.estimates)
        cells = {
            name: [
                f"{c:.{digits}f} ({s:.{digits}f})"
                for c, s in zip(cat.estimates[name].coefficients, cat.estimates[name].standard_errors)
            ]
            for name in names
        }
        width = max(14, *(len(v) for col in cells.values() for v in col), *(len(nm) for nm in names))
        label_w = max(8, *(len(c) for c in report.columns))
        lines.append("")
        lines.append(f"Level: {cat.level}".ljust(label_w) + "".join(nm.rjust(width + 2) for nm in names))
        d_row = [f"(d={cat.estimates[nm].d:.{digits}f})" if cat.estimates[nm].d is not None else "" for nm in names]
        lines.append("".ljust(label_w) + "".join(v.rjust(width + 2) for v in d_row))
        for i, col in enumerate(report.columns):
            lines.append(col.ljust(label_w) + "".join(cells[nm][i].rjust(width + 2) for nm in names))
        lines.append(
            "MSE".ljust(label_w)
            + "".join(f"{cat.estimates[nm].scalar_mse:.{digits}f}".rjust(width + 2) for nm in names)
        )
        lines.append(f"condition number of X'W_jX: {cat.condition_number:.3f}")
    if report.total_mse:
        lines.append("")
        lines.append("Total MSE: " + ", ".join(f"{k}={v:.{digits}f}" for k, v in report.total_mse.items()))
    return "\n".join(lines) + "\n"

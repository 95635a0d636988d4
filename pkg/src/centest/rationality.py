"""Single-functional rationality tests.

Mean and median use the classical instrument-moment Wald form

    J = (1/T) (sum_t v_t h_t)' Omega^{-1} (sum_t v_t h_t),
    Omega = (1/T) sum_t v_t^2 h_t h_t',

with v the identification value. One-step forecast errors form an
(approximate) martingale difference sequence, so the uncentered outer
product is the right covariance estimator and no HAC correction is applied.

The mode test replaces v by the smoothed identification function with a
shrinking bandwidth:

    psi_t  = -delta**(-2) K'(eps_t / delta) h_t
    m      = delta**(3/2) T**(-1/2) sum_t psi_t
    Omega  = (1/T) sum_t delta**(-1) K'(eps_t / delta)^2 h_t h_t'
    J      = m' Omega^{-1} m

Both statistics are asymptotically chi-square with k = dim(h) degrees of
freedom under their null.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandwidth import bandwidth_rule_of_thumb
from .identification import (
    ForecastDataset,
    Functional,
    forecast_errors,
    identification_values,
)
from .numerics import Kernel, chi_square_sf, gaussian_kernel, solve_spd


@dataclass(frozen=True)
class TestResult:
    """Outcome of one rationality test."""

    statistic: float
    df: int
    p_value: float
    functional: Functional
    bandwidth: float | None
    covariance: np.ndarray

    def reject_at(self, alpha: float) -> bool:
        return self.p_value < alpha


def instrument_moment_test(
    kind: Functional | str, dataset: ForecastDataset
) -> TestResult:
    """Wald test of mean or median forecast rationality.

    Raises SingularMatrixError when the moment covariance fails the
    eigenvalue floor (for example, identically zero errors).
    """
    kind = Functional(kind)
    if kind is Functional.MODE:
        raise ValueError("use mode_test for the mode; it needs a bandwidth")
    errors = forecast_errors(dataset)
    values = identification_values(kind, errors)
    h = dataset.instruments
    t = dataset.n_obs
    vh = values[:, None] * h
    omega = vh.T @ vh / t
    total = vh.sum(axis=0)
    statistic = float(total @ solve_spd(omega, total)) / t
    k = dataset.n_instruments
    return TestResult(
        statistic=statistic,
        df=k,
        p_value=chi_square_sf(k, statistic),
        functional=kind,
        bandwidth=None,
        covariance=omega,
    )


def mode_test(
    dataset: ForecastDataset,
    delta: float | None = None,
    kernel: Kernel | None = None,
) -> TestResult:
    """Nonparametric test of mode forecast rationality.

    ``delta`` defaults to the rule-of-thumb bandwidth computed from the
    forecast errors. Raises DegenerateErrors if the errors carry no
    dispersion and SingularMatrixError if the covariance is singular.
    """
    kernel = kernel or gaussian_kernel()
    errors = forecast_errors(dataset)
    t = dataset.n_obs
    if delta is None:
        delta = bandwidth_rule_of_thumb(errors, t).delta
    elif delta <= 0:
        raise ValueError(f"bandwidth must be positive, got {delta}")
    h = dataset.instruments
    kp = kernel.deriv_at(errors / delta)
    psi = (-(delta ** -2.0) * kp)[:, None] * h
    moment = delta ** 1.5 * t ** -0.5 * psi.sum(axis=0)
    omega = (h * (delta ** -1.0 * kp ** 2)[:, None]).T @ h / t
    statistic = float(moment @ solve_spd(omega, moment))
    k = dataset.n_instruments
    return TestResult(
        statistic=statistic,
        df=k,
        p_value=chi_square_sf(k, statistic),
        functional=Functional.MODE,
        bandwidth=float(delta),
        covariance=omega,
    )

"""Convex-combination rationality machinery: the combined moment, its GMM
objective, plain and clustered covariance estimators, and grid-based
confidence sets over the unit simplex of (mean, median, mode) weights.

The weight vector may be strongly, weakly, partially or completely
unidentified, which rules out point estimation; the confidence set inverts
the objective against chi-square critical values instead, which stays valid
in all four identification regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandwidth import bandwidth_rule_of_thumb
from .errors import SingularMatrixError
from .identification import ForecastDataset, StackedMoments, stacked_moments
from .numerics import Kernel, chi_square_quantile, chi_square_sf, gaussian_kernel, solve_spd

DEFAULT_ALPHA_LEVELS = (0.05, 0.10)
DEFAULT_GRID_RESOLUTION = 50


@dataclass(frozen=True)
class SimplexWeights:
    """A point on the unit simplex of identification-function weights."""

    mean: float
    median: float
    mode: float

    def __post_init__(self):
        arr = self.as_array()
        if np.any(arr < -1e-12):
            raise ValueError(f"weights must be nonnegative, got {arr}")
        if abs(arr.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got sum {arr.sum()!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mean, self.median, self.mode], dtype=float)

    @classmethod
    def from_array(cls, theta) -> "SimplexWeights":
        a = np.asarray(theta, dtype=float)
        if a.shape != (3,):
            raise ValueError(f"expected 3 weights, got shape {a.shape}")
        return cls(mean=float(a[0]), median=float(a[1]), mode=float(a[2]))


MEAN_VERTEX = SimplexWeights(1.0, 0.0, 0.0)
MEDIAN_VERTEX = SimplexWeights(0.0, 1.0, 0.0)
MODE_VERTEX = SimplexWeights(0.0, 0.0, 1.0)


def _theta_array(theta) -> np.ndarray:
    if isinstance(theta, SimplexWeights):
        return theta.as_array()
    return SimplexWeights.from_array(theta).as_array()


def simplex_grid(m: int) -> list[SimplexWeights]:
    """Lattice (i/m, j/m, (m-i-j)/m), i, j >= 0, i+j <= m, in lexicographic
    (i, j) order; (m+1)(m+2)/2 points."""
    if m < 1:
        raise ValueError(f"grid resolution must be >= 1, got {m}")
    points = []
    for i in range(m + 1):
        for j in range(m - i + 1):
            points.append(SimplexWeights(i / m, j / m, (m - i - j) / m))
    return points


def combined_moment(theta, stacked: StackedMoments) -> np.ndarray:
    """phi_t(theta) = theta' psi_t for every observation; (T, k) array."""
    th = _theta_array(theta)
    return np.einsum("r,trk->tk", th, stacked.per_obs)


def sigma_hat(phi: np.ndarray, cluster_labels=None) -> np.ndarray:
    """Uncentered covariance of the combined moment.

    Without clusters: (1/T) sum_t phi_t phi_t'. With clusters, observations
    are summed within each wave before the outer product, which collapses to
    the plain estimator when every observation is its own wave. Waves are
    processed in order of first appearance, keeping the reduction order
    fixed regardless of label encoding.
    """
    phi = np.asarray(phi, dtype=float)
    t = phi.shape[0]
    if cluster_labels is None:
        return phi.T @ phi / t
    labels = np.asarray(cluster_labels)
    if labels.size != t:
        raise ValueError("cluster labels must cover every observation")
    _, first_pos, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first_pos, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    wave_sums = np.zeros((order.size, phi.shape[1]))
    np.add.at(wave_sums, rank[inverse], phi)
    return wave_sums.T @ wave_sums / t


def gmm_objective_from_stacked(
    theta, stacked: StackedMoments, cluster_labels=None
) -> float:
    """S_T(theta) from precomputed stacked rows (the grid-scan fast path)."""
    phi = combined_moment(theta, stacked)
    t = phi.shape[0]
    g = phi.sum(axis=0) / np.sqrt(t)
    sigma = sigma_hat(phi, cluster_labels)
    return float(g @ solve_spd(sigma, g))


def gmm_objective(
    theta,
    dataset: ForecastDataset,
    delta: float | None = None,
    kernel: Kernel | None = None,
    cluster_labels=None,
) -> float:
    """Continuous-updating GMM objective

        S_T(theta) = [T^{-1/2} sum phi_t(theta)]' Sigma(theta)^{-1}
                     [T^{-1/2} sum phi_t(theta)],

    nonnegative by construction. Sigma depends on theta and is recomputed at
    every point. ``cluster_labels`` defaults to the dataset's own labels.
    """
    kernel = kernel or gaussian_kernel()
    if delta is None:
        delta = bandwidth_rule_of_thumb(
            dataset.forecasts - dataset.realizations, dataset.n_obs
        ).delta
    if cluster_labels is None:
        cluster_labels = dataset.cluster_labels
    stacked = stacked_moments(dataset, delta, kernel)
    return gmm_objective_from_stacked(theta, stacked, cluster_labels)


@dataclass(frozen=True)
class GridPoint:
    """One evaluated grid point. ``note`` records a per-point singularity;
    such points are non-members at every level and never abort the scan."""

    index: tuple[int, int]
    weights: SimplexWeights
    objective: float
    p_value: float
    memberships: dict[float, bool]
    note: str | None = None

    def member_at(self, alpha: float) -> bool:
        return self.memberships[alpha]


@dataclass(frozen=True)
class ConfidenceSetGrid:
    """Simplex scan of the GMM objective with membership flags per level."""

    resolution: int
    points: list[GridPoint]
    alpha_levels: tuple[float, ...]
    bandwidth: float
    df: int
    n_obs: int

    def members(self, alpha: float) -> list[GridPoint]:
        return [p for p in self.points if p.memberships[alpha]]

    def is_empty(self, alpha: float) -> bool:
        """Empty membership rejects rationality for the entire class of
        centrality measures at that level."""
        return not any(p.memberships[alpha] for p in self.points)


def confidence_set(
    dataset: ForecastDataset,
    m: int = DEFAULT_GRID_RESOLUTION,
    alpha_levels: tuple[float, ...] = DEFAULT_ALPHA_LEVELS,
    delta: float | None = None,
    kernel: Kernel | None = None,
    cluster_labels=None,
) -> ConfidenceSetGrid:
    """Evaluate S_T on the simplex lattice and flag membership per level.

    A point belongs to the 1-alpha confidence set iff S_T <= Q_k(1-alpha).
    The bandwidth is computed once from the forecast errors and shared by
    every theta. Per-point singular covariances are recorded and skipped.
    """
    if m < 1:
        raise ValueError(f"grid resolution must be >= 1, got {m}")
    alpha_levels = tuple(alpha_levels)
    if not alpha_levels or not all(0.0 < a < 1.0 for a in alpha_levels):
        raise ValueError(f"alpha levels must lie in (0, 1), got {alpha_levels}")
    kernel = kernel or gaussian_kernel()
    if delta is None:
        delta = bandwidth_rule_of_thumb(
            dataset.forecasts - dataset.realizations, dataset.n_obs
        ).delta
    if cluster_labels is None:
        cluster_labels = dataset.cluster_labels
    stacked = stacked_moments(dataset, delta, kernel)
    k = dataset.n_instruments
    thresholds = {a: chi_square_quantile(k, 1.0 - a) for a in alpha_levels}

    points: list[GridPoint] = []
    for i in range(m + 1):
        for j in range(m - i + 1):
            weights = SimplexWeights(i / m, j / m, (m - i - j) / m)
            try:
                s = gmm_objective_from_stacked(weights, stacked, cluster_labels)
            except SingularMatrixError as exc:
                points.append(
                    GridPoint(
                        index=(i, j),
                        weights=weights,
                        objective=float("nan"),
                        p_value=float("nan"),
                        memberships={a: False for a in alpha_levels},
                        note=str(exc),
                    )
                )
                continue
            points.append(
                GridPoint(
                    index=(i, j),
                    weights=weights,
                    objective=s,
                    p_value=chi_square_sf(k, s),
                    memberships={a: s <= thresholds[a] for a in alpha_levels},
                )
            )
    return ConfidenceSetGrid(
        resolution=m,
        points=points,
        alpha_levels=alpha_levels,
        bandwidth=float(delta),
        df=k,
        n_obs=dataset.n_obs,
    )

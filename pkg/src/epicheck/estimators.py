"""Entropy and Fisher-information estimators with explicit error bars.

Every quantity comes back as a :class:`ScalarEstimate` tagged with the
method that produced it.  Closed forms (pure Gaussians) carry zero
standard error; plug-in Monte-Carlo estimates report the CLT standard
error of the sample mean; the k-nearest-neighbour entropy estimator uses a
grouped jackknife.  Entropies are differential entropies in nats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .exceptions import DimensionError
from .mixtures import GaussianComponent, GaussianMixture
from .seeding import rng_from_tokens, stable_digest

LN_2PI = float(np.log(2.0 * np.pi))
LN_2PIE = LN_2PI + 1.0

METHOD_CLOSED = "closed_form"
METHOD_MC = "plug_in_mc"
METHOD_KNN = "knn"

DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class ScalarEstimate:
    """Point estimate with standard error, sample count, and provenance."""

    value: float
    std_error: float = 0.0
    n_samples: int = 0
    method: str = METHOD_CLOSED

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"estimate must be finite, got {self.value}")
        if self.std_error < 0.0:
            raise ValueError("standard error cannot be negative")
        if self.method == METHOD_CLOSED and self.std_error != 0.0:
            raise ValueError("closed-form estimates carry zero standard error")


def _mean_and_se(values: np.ndarray, method: str) -> ScalarEstimate:
    m = values.shape[0]
    se = float(np.std(values, ddof=1) / np.sqrt(m)) if m > 1 else 0.0
    return ScalarEstimate(float(np.mean(values)), se, m, method)


def gaussian_entropy(g: GaussianComponent) -> ScalarEstimate:
    """h = (n ln(2 pi e) + ln det Sigma) / 2, exact."""
    value = 0.5 * (g.dim * LN_2PIE + g.cov.log_det)
    return ScalarEstimate(value, 0.0, 0, METHOD_CLOSED)


def entropy_power(h: ScalarEstimate, n: int) -> ScalarEstimate:
    """N = exp(2 h / n); the error bar follows by the delta method."""
    if n < 1:
        raise DimensionError("dimension must be at least 1")
    value = math.exp(2.0 * h.value / n)
    se = (2.0 / n) * value * h.std_error
    return ScalarEstimate(value, se, h.n_samples, h.method)


def mc_entropy(gm: GaussianMixture, m: int, rng: np.random.Generator) -> ScalarEstimate:
    """Plug-in Monte-Carlo entropy: mean of -log f over its own samples.

    Unbiased for E[-log f]; the reported error is the CLT standard error,
    so m should be at least ~1e3 for the bar to be trustworthy.
    """
    pts = gm.sample(rng, m)
    return _mean_and_se(-gm.log_density(pts), METHOD_MC)


def entropy(
    gm: GaussianMixture,
    m: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """Closed form for a pure Gaussian, Monte-Carlo otherwise."""
    if gm.is_gaussian:
        return gaussian_entropy(gm.components[0])
    if rng is None:
        raise ValueError("a generator is required for the Monte-Carlo route")
    return mc_entropy(gm, m, rng)


def knn_entropy(samples, k: int = 4) -> ScalarEstimate:
    """Kozachenko-Leonenko nearest-neighbour entropy of a sample cloud.

    h ~ psi(m) - psi(k) + ln(unit-ball volume) + (d/m) sum ln r_i with r_i
    the Euclidean distance to the k-th neighbour.  Duplicate points get a
    deterministic sub-1e-9 jitter (with a warning) so the log distances
    stay finite.  The standard error is a 10-fold grouped jackknife.
    """
    x = np.array(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimensionError(f"samples must be a (m, d) array, got shape {x.shape}")
    m, d = x.shape
    if not 1 <= k < m:
        raise ValueError(f"need 1 <= k < m, got k={k}, m={m}")

    r = cKDTree(x).query(x, k=k + 1)[0][:, k]
    if np.any(r <= 0.0):
        warnings.warn(
            "duplicate sample points detected; applying a tiny deterministic jitter",
            RuntimeWarning,
        )
        spread = float(np.mean(np.std(x, axis=0)))
        jitter_rng = rng_from_tokens("knn-jitter", stable_digest([x]))
        x = x + 1e-10 * max(spread, 1.0) * jitter_rng.standard_normal(x.shape)

    log_ball = 0.5 * d * np.log(np.pi) - math.lgamma(0.5 * d + 1.0)

    def estimate(points: np.ndarray) -> float:
        mm = points.shape[0]
        dist = cKDTree(points).query(points, k=k + 1)[0][:, k]
        return float(
            digamma(mm) - digamma(k) + log_ball + d * np.mean(np.log(dist))
        )

    value = estimate(x)
    folds = np.array_split(np.arange(m), 10)
    folds = [f for f in folds if f.size]
    thetas = np.array([estimate(np.delete(x, f, axis=0)) for f in folds])
    nf = len(thetas)
    se = float(np.sqrt((nf - 1) / nf * np.sum((thetas - thetas.mean()) ** 2)))
    return ScalarEstimate(value, se, m, METHOD_KNN)


def conditional_entropy(
    gm: GaussianMixture,
    given,
    m: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """h(rest | coordinates in ``given``) = h(joint) - h(marginal).

    The Monte-Carlo route evaluates both log-densities on the same draws,
    so the per-sample difference is paired and the error bar reflects the
    (much smaller) variance of the difference.
    """
    given = sorted(int(i) for i in given)
    if not given or len(given) >= gm.dim:
        raise DimensionError("conditioning set must be a nonempty proper subset")
    if len(set(given)) != len(given):
        raise ValueError(f"duplicate coordinates in {given}")
    if any(not 0 <= i < gm.dim for i in given):
        raise IndexError(f"coordinates {given} out of range for dimension {gm.dim}")
    k = gm.dim - len(given)
    if gm.is_gaussian:
        cov = gm.components[0].cov
        sub = cov.entries[np.ix_(given, given)]
        ld_given = 2.0 * float(np.sum(np.log(np.diagonal(np.linalg.cholesky(sub)))))
        value = 0.5 * (k * LN_2PIE + cov.log_det - ld_given)
        return ScalarEstimate(value, 0.0, 0, METHOD_CLOSED)
    if rng is None:
        raise ValueError("a generator is required for the Monte-Carlo route")
    marg = gm.marginal(given)
    pts = gm.sample(rng, m)
    diffs = -gm.log_density(pts) + marg.log_density(pts[:, given])
    return _mean_and_se(diffs, METHOD_MC)


def conditional_entropy_last(
    gm: GaussianMixture,
    m: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """h(X_n | X_1..X_{n-1}); closed form is half the log Schur complement plus
    the Gaussian constant."""
    if gm.dim < 2:
        raise DimensionError("conditioning needs dimension at least 2")
    return conditional_entropy(gm, range(gm.dim - 1), m, rng)


def gaussian_fisher(g: GaussianComponent) -> ScalarEstimate:
    """I = tr(Sigma^-1), from the inverse Cholesky factor."""
    inv_chol = np.linalg.solve(g.cov.chol, np.eye(g.dim))
    return ScalarEstimate(float(np.sum(inv_chol**2)), 0.0, 0, METHOD_CLOSED)


def mc_fisher(gm: GaussianMixture, m: int, rng: np.random.Generator) -> ScalarEstimate:
    """Fisher information as the mean squared norm of the exact score."""
    pts = gm.sample(rng, m)
    s = gm.score(pts)
    return _mean_and_se(np.einsum("ij,ij->i", s, s), METHOD_MC)


def fisher(
    gm: GaussianMixture,
    m: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """Closed form for a pure Gaussian, Monte-Carlo otherwise."""
    if gm.is_gaussian:
        return gaussian_fisher(gm.components[0])
    if rng is None:
        raise ValueError("a generator is required for the Monte-Carlo route")
    return mc_fisher(gm, m, rng)


def projective_fisher(
    gm: GaussianMixture,
    u,
    m: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """Directional Fisher information E[<score, u>^2] for a unit vector u.

    For a pure Gaussian this is u' Sigma^-1 u exactly; in the direction of
    the last axis it equals the reciprocal Schur complement.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != gm.dim:
        raise DimensionError(f"direction of length {u.shape[0]} for dimension {gm.dim}")
    if abs(float(u @ u) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector to 1e-12")
    if gm.is_gaussian:
        w = np.linalg.solve(gm.components[0].cov.chol, u)
        return ScalarEstimate(float(w @ w), 0.0, 0, METHOD_CLOSED)
    if rng is None:
        raise ValueError("a generator is required for the Monte-Carlo route")
    pts = gm.sample(rng, m)
    proj = gm.score(pts) @ u
    return _mean_and_se(proj**2, METHOD_MC)


def conditional_fisher_last(
    gm: GaussianMixture,
    m_outer: int = 1000,
    m_inner: int = 1000,
    rng: np.random.Generator | None = None,
) -> ScalarEstimate:
    """Average Fisher information of the last coordinate given the rest.

    Outer Monte-Carlo over prefixes drawn from the (n-1)-marginal; for each
    prefix the 1-D conditional mixture is formed exactly and its Fisher
    information is estimated with the closed-form score on inner samples.
    The error bar is the spread across outer draws, which also absorbs the
    inner noise.
    """
    if gm.dim < 2:
        raise DimensionError("conditioning needs dimension at least 2")
    if rng is None:
        raise ValueError("a generator is required for the Monte-Carlo route")
    prefixes = gm.marginal(range(gm.dim - 1)).sample(rng, m_outer)
    vals = np.empty(m_outer)
    for j in range(m_outer):
        cond = gm.conditional_slice(prefixes[j])
        pts = cond.sample(rng, m_inner)
        s = cond.score(pts)
        vals[j] = np.mean(s * s)
    return _mean_and_se(vals, METHOD_MC)

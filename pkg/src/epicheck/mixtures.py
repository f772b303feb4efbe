"""Finite Gaussian mixtures with exact densities, scores, and closure ops.

Mixtures are the carrier family for every Monte-Carlo check: they are
closed under independent sums, nonzero scaling, coordinate marginals,
invertible linear maps, and conditioning on all but the last coordinate,
and their log-density and score are exact (log-sum-exp over component
Gaussians, responsibility-weighted Gaussian scores).  A single-component
mixture is detected everywhere as "pure Gaussian" so closed forms can be
used instead of sampling.

Also defines the finite-label Markov triple (Z discrete, X and Y mixtures
conditionally independent given Z) used by the conditional entropy-power
check.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .exceptions import DegenerateLawError, DimensionError
from .matrices import SpdMatrix

LN_2PI = float(np.log(2.0 * np.pi))
WEIGHT_TOL = 1e-12


class GaussianComponent:
    """Single Gaussian law: mean vector plus SPD covariance."""

    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov) -> None:
        cov = cov if isinstance(cov, SpdMatrix) else SpdMatrix(cov)
        mean = np.atleast_1d(np.array(mean, dtype=float))
        if mean.ndim != 1 or mean.shape[0] != cov.dim:
            raise DimensionError(
                f"mean shape {mean.shape} does not match covariance dimension {cov.dim}"
            )
        mean.setflags(write=False)
        self.mean = mean
        self.cov = cov

    @property
    def dim(self) -> int:
        return self.cov.dim

    def log_density(self, pts: np.ndarray) -> np.ndarray:
        """Log-density at each row of ``pts`` (m, n)."""
        diff = pts - self.mean
        w = solve_triangular(self.cov.chol, diff.T, lower=True)
        quad = np.einsum("ij,ij->j", w, w)
        return -0.5 * (quad + self.dim * LN_2PI + self.cov.log_det)

    def solve_cov(self, diff_t: np.ndarray) -> np.ndarray:
        """Sigma^-1 @ diff_t for a stacked (n, m) right-hand side."""
        low = solve_triangular(self.cov.chol, diff_t, lower=True)
        return solve_triangular(self.cov.chol.T, low, lower=False)


class GaussianMixture:
    """Immutable finite mixture of Gaussian components.

    Weights are strictly positive and sum to one within 1e-12.  All
    sampling goes through an explicit ``numpy.random.Generator``.
    """

    __slots__ = ("dim", "weights", "components")

    def __init__(self, weights, components) -> None:
        components = [
            c if isinstance(c, GaussianComponent) else GaussianComponent(*c)
            for c in components
        ]
        if not components:
            raise ValueError("mixture needs at least one component")
        w = np.array(weights, dtype=float).reshape(-1)
        if w.shape[0] != len(components):
            raise DimensionError(
                f"{w.shape[0]} weights for {len(components)} components"
            )
        if np.any(w <= 0.0):
            raise ValueError("mixture weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError("mixture weights must sum to 1 within 1e-12")
        dim = components[0].dim
        if any(c.dim != dim for c in components):
            raise DimensionError("all components must share one dimension")
        w.setflags(write=False)
        self.dim = dim
        self.weights = w
        self.components = components

    @classmethod
    def gaussian(cls, mean, cov) -> "GaussianMixture":
        """Single-component mixture, i.e. a plain Gaussian."""
        return cls([1.0], [GaussianComponent(mean, cov)])

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def is_gaussian(self) -> bool:
        return len(self.components) == 1

    def _as_points(self, x) -> tuple[np.ndarray, bool]:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionError(
                f"points of shape {np.shape(x)} do not match dimension {self.dim}"
            )
        return pts, single

    def _log_joint(self, pts: np.ndarray) -> np.ndarray:
        """(K, m) matrix of log w_c + log phi_c(x)."""
        rows = [
            np.log(w) + comp.log_density(pts)
            for w, comp in zip(self.weights, self.components)
        ]
        return np.vstack(rows)

    def log_density(self, x):
        """Exact mixture log-density; stable for arguments as far as |x| ~ 1e6."""
        pts, single = self._as_points(x)
        out = logsumexp(self._log_joint(pts), axis=0)
        return float(out[0]) if single else out

    def score(self, x):
        """Gradient of the log-density: responsibility-weighted Gaussian scores."""
        pts, single = self._as_points(x)
        logs = self._log_joint(pts)
        logs = logs - logsumexp(logs, axis=0)
        resp = np.exp(logs)
        acc = np.zeros_like(pts)
        for c, comp in enumerate(self.components):
            diff = pts - comp.mean
            acc -= resp[c][:, None] * comp.solve_cov(diff.T).T
        return acc[0] if single else acc

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """Draw ``m`` points: categorical component choice, then Cholesky."""
        if m < 1:
            raise ValueError("sample count must be positive")
        idx = rng.choice(self.n_components, size=m, p=self.weights)
        z = rng.standard_normal((m, self.dim))
        out = np.empty((m, self.dim))
        for c, comp in enumerate(self.components):
            sel = idx == c
            if np.any(sel):
                out[sel] = comp.mean + z[sel] @ comp.cov.chol.T
        return out

    def convolve(self, other: "GaussianMixture") -> "GaussianMixture":
        """Law of the sum of independent draws: all pairwise components."""
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        weights = []
        comps = []
        for wa, ca in zip(self.weights, self.components):
            for wb, cb in zip(other.weights, other.components):
                weights.append(wa * wb)
                comps.append(
                    GaussianComponent(ca.mean + cb.mean, ca.cov.entries + cb.cov.entries)
                )
        w = np.array(weights)
        return GaussianMixture(w / w.sum(), comps)

    def scale(self, s: float) -> "GaussianMixture":
        """Law of s X; s = 0 has no density and is rejected."""
        if s == 0.0:
            raise DegenerateLawError("scaling by zero collapses the law to a point")
        comps = [
            GaussianComponent(s * c.mean, s * s * c.cov.entries) for c in self.components
        ]
        return GaussianMixture(self.weights, comps)

    def marginal(self, keep) -> "GaussianMixture":
        """Marginal over the listed coordinates, in the order given."""
        keep = [int(i) for i in keep]
        if not keep:
            raise DimensionError("marginal needs at least one coordinate")
        if len(set(keep)) != len(keep):
            raise ValueError(f"duplicate coordinates in {keep}")
        if any(not 0 <= i < self.dim for i in keep):
            raise IndexError(f"coordinates {keep} out of range for dimension {self.dim}")
        sel = np.ix_(keep, keep)
        comps = [
            GaussianComponent(c.mean[keep], c.cov.entries[sel]) for c in self.components
        ]
        return GaussianMixture(self.weights, comps)

    def linear_map(self, a) -> "GaussianMixture":
        """Law of A X for invertible square A."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape != (self.dim, self.dim):
            raise DimensionError(
                f"map of shape {a.shape} does not match dimension {self.dim}"
            )
        sign, _ = np.linalg.slogdet(a)
        if sign == 0.0:
            raise ValueError("linear map must be invertible")
        comps = []
        for c in self.components:
            cov = a @ c.cov.entries @ a.T
            comps.append(GaussianComponent(a @ c.mean, 0.5 * (cov + cov.T)))
        return GaussianMixture(self.weights, comps)

    def conditional_slice(self, prefix) -> "GaussianMixture":
        """Exact 1-D conditional of the last coordinate given the first n-1.

        Component weights become posterior responsibilities of the prefix
        under the (n-1)-marginal; each conditional component keeps the usual
        Gaussian conditional mean and the Schur-complement variance.
        """
        n = self.dim
        if n < 2:
            raise DimensionError("conditioning needs dimension at least 2")
        prefix = np.atleast_1d(np.asarray(prefix, dtype=float))
        if prefix.shape != (n - 1,):
            raise DimensionError(
                f"prefix of shape {prefix.shape} does not match dimension {n - 1}"
            )
        log_w = np.empty(self.n_components)
        comps = []
        for c, comp in enumerate(self.components):
            p = comp.cov.entries[:-1, :-1]
            v = comp.cov.entries[:-1, -1]
            lp = np.linalg.cholesky(p)
            diff = prefix - comp.mean[:-1]
            y = solve_triangular(lp, diff, lower=True)
            t = solve_triangular(lp, v, lower=True)
            ld_p = 2.0 * float(np.sum(np.log(np.diagonal(lp))))
            log_w[c] = np.log(self.weights[c]) - 0.5 * (
                y @ y + (n - 1) * LN_2PI + ld_p
            )
            cond_mean = comp.mean[-1] + t @ y
            cond_var = comp.cov.entries[-1, -1] - t @ t
            comps.append(GaussianComponent([cond_mean], [[cond_var]]))
        w = np.exp(log_w - logsumexp(log_w))
        return GaussianMixture(w / w.sum(), comps)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "weights": [float(w) for w in self.weights],
            "components": [
                {
                    "mean": [float(v) for v in c.mean],
                    "cov": [[float(v) for v in row] for row in c.cov.entries],
                }
                for c in self.components
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianMixture":
        comps = [GaussianComponent(c["mean"], c["cov"]) for c in data["components"]]
        gm = cls(data["weights"], comps)
        if "dim" in data and int(data["dim"]) != gm.dim:
            raise DimensionError(
                f"declared dim {data['dim']} does not match components of dim {gm.dim}"
            )
        return gm

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GaussianMixture":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"GaussianMixture(dim={self.dim}, n_components={self.n_components})"


class MarkovTriple:
    """Finite-label conditioning structure X <- Z -> Y.

    Z takes finitely many values with strictly positive probabilities
    summing to one; given Z = z the laws of X and Y are the stored mixtures
    and are conditionally independent, which is the Markov-chain hypothesis
    the conditional entropy-power check needs.
    """

    __slots__ = ("probs", "x_given_z", "y_given_z", "dim")

    def __init__(self, probs, x_given_z, y_given_z) -> None:
        p = np.array(probs, dtype=float).reshape(-1)
        if p.size < 1 or np.any(p <= 0.0):
            raise ValueError("label probabilities must be strictly positive")
        if abs(float(p.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError("label probabilities must sum to 1 within 1e-12")
        x_given_z = list(x_given_z)
        y_given_z = list(y_given_z)
        if len(x_given_z) != p.size or len(y_given_z) != p.size:
            raise DimensionError("one conditional law required per label, for X and Y")
        dim = x_given_z[0].dim
        if any(g.dim != dim for g in x_given_z + y_given_z):
            raise DimensionError("all conditional laws must share one dimension")
        p.setflags(write=False)
        self.probs = p
        self.x_given_z = x_given_z
        self.y_given_z = y_given_z
        self.dim = dim

    @property
    def n_labels(self) -> int:
        return self.probs.size

"""Closed-form and quadrature quantities of the intersection-graph model.

For two vertices at distance t, the number of groups they share is
Poisson with mean mu * f(t), so they are connected with probability
1 - exp(-mu f(t)).  The expected degree of a typical vertex follows by
integrating that probability against the vertex intensity; it is bounded
above by lambda * mu * ||g||^2 and bracketed through the level radii of
f.  A compound-Poisson sampler dominating the true degree distribution
and the branching diagnostic lambda * mu * ||g||^2 < 1 round things out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .geometry import ball_volume, sphere_surface
from .kernels import ConvolutionProfile, eval_profile, radius_level


def connection_probability(profile: ConvolutionProfile, mu: float, t):
    """Probability that two vertices at distance t share at least one group."""
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    f_val = eval_profile(profile, t)
    return -np.expm1(-mu * f_val) if isinstance(f_val, np.ndarray) else -math.expm1(-mu * f_val)


def expected_degree(profile: ConvolutionProfile, lam: float, mu: float, tol: float = 1e-6) -> float:
    """Expected vertex degree lambda * integral of (1 - e^{-mu f}) over R^d.

    Radial reduction: lambda * S_{d-1} * int_0^T (1 - e^{-mu f(t)}) t^{d-1} dt,
    cut off at the radius where the connection probability falls below tol
    (capped at the profile's tabulated range).
    """
    if lam < 0 or mu < 0:
        raise ValueError("intensities must be >= 0")
    if not 0 < tol < 1:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    if lam == 0 or mu == 0:
        return 0.0
    level = -math.log1p(-tol) / mu  # f-level where 1 - e^{-mu f} = tol
    if level >= profile.f0:
        return 0.0
    cutoff = radius_level(profile, level)
    if cutoff <= 0:
        return 0.0
    d = profile.d
    surface = sphere_surface(d)

    if profile.kind == "tabulated":
        integral = _integrate_tabulated_radial(profile, mu, cutoff)
    else:
        def integrand(t):
            return -math.expm1(-mu * float(eval_profile(profile, t))) * t ** (d - 1)

        integral, _ = integrate.quad(integrand, 0.0, cutoff, epsabs=1e-13, epsrel=1e-11, limit=200)
    return lam * surface * integral


def _integrate_tabulated_radial(profile: ConvolutionProfile, mu: float, cutoff: float) -> float:
    """Per-segment Gauss-Legendre on the piecewise-linear profile."""
    radii, values, d = profile.radii, profile.values, profile.d
    stop = int(np.searchsorted(radii, cutoff, side="right"))
    lo = radii[: stop - 1].copy()
    hi = np.minimum(radii[1:stop], cutoff)
    if lo.size == 0:
        return 0.0
    v_lo = values[: stop - 1]
    slope = np.where(
        np.diff(radii[:stop]) > 0, np.diff(values[:stop]) / np.diff(radii[:stop]), 0.0
    )
    nodes, weights = special.roots_legendre(8)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    f_x = v_lo[:, None] + slope[:, None] * (x - lo[:, None])
    vals = -np.expm1(-mu * f_x) * x ** (d - 1)
    return float(np.sum(half[:, None] * weights[None, :] * vals))


@dataclass(frozen=True)
class DegreeBounds:
    """Bounds on the expected degree.

    upper_simple = lambda * mu * ||g||^2 (linearizing the exponential);
    bracket_low  = lambda * ball(r_{1/mu}) * (1 - 1/e), with r_{1/mu} the
    radius where f crosses 1/mu; bracket_high = lambda * ball(r_0) with
    r_0 the support radius of f, infinite for unbounded kernels.
    """

    upper_simple: float
    bracket_low: float
    bracket_high: float

    def contains(self, value: float) -> bool:
        return self.bracket_low <= value <= min(self.upper_simple, self.bracket_high) + 1e-12


def degree_bounds(profile: ConvolutionProfile, lam: float, mu: float) -> DegreeBounds:
    if lam < 0 or mu < 0:
        raise ValueError("intensities must be >= 0")
    d = profile.d
    upper = lam * mu * profile.norm_g**2
    if mu == 0:
        r_low = 0.0
    else:
        r_low = radius_level(profile, 1.0 / mu) if 1.0 / mu < profile.f0 else 0.0
    low = lam * ball_volume(d, r_low) * (1.0 - math.exp(-1.0))
    r_0 = 2.0 * profile.kernel_support
    high = lam * ball_volume(d, r_0) if math.isfinite(r_0) else math.inf
    return DegreeBounds(upper_simple=upper, bracket_low=low, bracket_high=high)


@dataclass(frozen=True)
class OffspringMean:
    """Branching-process bound parameter lambda * mu * ||g||^2.

    Below 1 the origin component is almost surely finite; at or above 1
    the diagnostic draws no conclusion.
    """

    value: float
    subcritical: bool


def offspring_mean(lam: float, mu: float, norm_g: float) -> OffspringMean:
    if lam < 0 or mu < 0 or norm_g < 0:
        raise ValueError("arguments must be >= 0")
    value = lam * mu * norm_g**2
    return OffspringMean(value=value, subcritical=bool(value < 1.0))


def sample_dominating_degree(lam: float, mu: float, norm_g: float, rng: np.random.Generator, size=None):
    """Compound-Poisson sample dominating the typical vertex degree.

    Draws N ~ Poisson(mu ||g||) groups, then the total of N i.i.d.
    Poisson(lambda ||g||) group sizes; the sum collapses to a single
    Poisson(N * lambda ||g||) draw.
    """
    if lam < 0 or mu < 0 or norm_g < 0:
        raise ValueError("arguments must be >= 0")
    n_groups = rng.poisson(mu * norm_g, size=size)
    total = rng.poisson(n_groups * (lam * norm_g))
    return total if size is not None else int(total)


def isolated_probability_bound(mu: float, norm_g: float) -> float:
    """P(origin joins no group) = e^{-mu ||g||}, a lower bound on P(D = 0)."""
    if mu < 0 or norm_g < 0:
        raise ValueError("arguments must be >= 0")
    return math.exp(-mu * norm_g)


def analytics_record(quantity: str, params: dict, value, **extra) -> dict:
    """Uniform JSON shape for analytic outputs."""
    rec = {"quantity": quantity, "params": params, "value": value}
    rec.update(extra)
    return rec

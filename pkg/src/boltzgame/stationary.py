"""Analytic stationary densities of the Fokker-Planck limit with D(w) = 1 - w^2.

Both follower and leader steady states solve

    (c - w) f(w) = sigma2 / 2 * d/dw[(1 - w^2)^2 f(w)]

on (-1, 1), with centre c (consensus value or leader shift) and variance
parameter sigma2.  The solution is

    f(w) = gamma (1 + w)^(-2 + c/(2 sigma2)) (1 - w)^(-2 - c/(2 sigma2))
           * exp(-(1 - c w) / (sigma2 (1 - w^2))).

Densities are handled in log space because small ``sigma2`` makes the
unnormalised values underflow.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .moments import MeanSystemParams, asymptotic_consensus, integrate_means

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def log_stationary(w, center: float, sigma2: float):
    """Unnormalised log density; ``w`` must lie in the open interval (-1, 1)."""
    w = np.asarray(w, dtype=float)
    a = center / (2.0 * sigma2)
    return ((-2.0 + a) * np.log1p(w) + (-2.0 - a) * np.log1p(-w)
            - (1.0 - center * w) / (sigma2 * (1.0 - w * w)))


def follower_density(w, vbar: float, sigma_F2: float):
    """Unnormalised follower steady state (may underflow for small sigma_F2)."""
    return np.exp(log_stationary(w, vbar, sigma_F2))


def leader_density(v, b_L: float, sigma_eta2: float):
    """Unnormalised leader steady state of one group."""
    return np.exp(log_stationary(v, b_L, sigma_eta2))


def _panel_nodes(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
    weights = (half[:, None] * _GL_WEIGHTS).ravel()
    return nodes, weights


def _log_integral(log_f: Callable, a: float, b: float, panels: int) -> float:
    nodes, weights = _panel_nodes(a, b, panels)
    lf = log_f(nodes)
    top = np.max(lf)
    return float(top + np.log(np.sum(weights * np.exp(lf - top))))


def log_normalization(log_f: Callable, delta: float = 1e-3, rtol: float = 1e-13,
                      tail_tol: float = 1e-10, max_panels: int = 1 << 16) -> float:
    """log(gamma) such that gamma exp(log_f) integrates to one over (-1, 1).

    Composite 8-point Gauss-Legendre on [-1 + delta, 1 - delta], with the
    panel count doubled until the integral settles to ``rtol``.  ``delta``
    shrinks until the truncated tail mass, bounded by delta times the density
    at the cut (the density decays monotonically into the endpoints), is
    below ``tail_tol``.
    """
    while True:
        panels = 64
        prev = _log_integral(log_f, -1.0 + delta, 1.0 - delta, panels)
        while True:
            panels *= 2
            if panels > max_panels:
                raise RuntimeError("normalisation quadrature did not converge")
            cur = _log_integral(log_f, -1.0 + delta, 1.0 - delta, panels)
            if abs(cur - prev) <= rtol:
                break
            prev = cur
        cut = np.array([-1.0 + delta, 1.0 - delta])
        inner = np.array([-1.0 + 2 * delta, 1.0 - 2 * delta])
        lcut, linner = log_f(cut), log_f(inner)
        monotone = np.all(lcut <= linner)
        tail = np.log(delta) + np.logaddexp(lcut[0], lcut[1]) - cur
        if monotone and tail <= np.log(tail_tol):
            return -cur
        if delta < 1e-12:
            raise RuntimeError("tail mass of the stationary density is not controllable")
        delta /= 10.0


def normalize(density: Callable, **kw) -> float:
    """Normalisation constant gamma of a (non-negative) density callable."""
    return float(np.exp(log_normalization(lambda w: np.log(density(w)), **kw)))


@dataclass(frozen=True)
class StationaryDensity:
    """Normalised steady state with centre ``center`` and variance parameter ``sigma2``."""

    center: float
    sigma2: float
    log_gamma: float

    @classmethod
    def build(cls, center: float, sigma2: float) -> "StationaryDensity":
        if not sigma2 > 0:
            raise ConfigError("stationary: sigma2 must be > 0")
        if not -1.0 < center < 1.0:
            raise ConfigError("stationary: centre must lie in (-1, 1)")
        lg = log_normalization(lambda w: log_stationary(w, center, sigma2))
        return cls(center, sigma2, lg)

    @property
    def gamma(self) -> float:
        return float(np.exp(self.log_gamma))

    def log_pdf(self, w):
        return log_stationary(w, self.center, self.sigma2) + self.log_gamma

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape)
        inside = np.abs(w) < 1.0
        out[inside] = np.exp(self.log_pdf(w[inside]))
        return out if out.ndim else float(out)

    def integrate(self, g: Callable = None, a: float = -1.0, b: float = 1.0, panels: int = 4096) -> float:
        """Integral of g(w) f(w) over [a, b] (g = 1 by default)."""
        nodes, weights = _panel_nodes(a, b, panels)
        vals = self(nodes)
        if g is not None:
            vals = vals * g(nodes)
        return float(np.sum(weights * vals))

    def bin_masses(self, edges, panels_per_bin: int = 32) -> np.ndarray:
        edges = np.asarray(edges, dtype=float)
        return np.array([self.integrate(None, a, b, panels_per_bin) for a, b in zip(edges[:-1], edges[1:])])

    def mean(self) -> float:
        return self.integrate(lambda w: w)


def fd_residual(density: StationaryDensity, grid=None, h: Optional[float] = None) -> float:
    """Relative residual of (c - w) f = sigma2/2 (D^2 f)' by 4th-order central differences.

    Normalised by the sup norm of the left-hand side on the grid.
    """
    if grid is None:
        grid = np.linspace(-0.95, 0.95, 381)
    grid = np.asarray(grid, dtype=float)
    if h is None:
        h = 1e-3 * min(1.0, np.sqrt(density.sigma2))

    def flux(w):
        return (1.0 - w * w) ** 2 * density(w)

    deriv = (-flux(grid + 2 * h) + 8 * flux(grid + h) - 8 * flux(grid - h) + flux(grid - 2 * h)) / (12 * h)
    lhs = (density.center - grid) * density(grid)
    rhs = 0.5 * density.sigma2 * deriv
    scale = np.max(np.abs(lhs))
    return float(np.max(np.abs(lhs - rhs)) / scale)


def l1_distance(edges, empirical_density, density: StationaryDensity) -> float:
    """Sum over bins of |empirical bin mass - analytic bin mass|."""
    edges = np.asarray(edges, dtype=float)
    emp = np.asarray(empirical_density, dtype=float) * np.diff(edges)
    return float(np.sum(np.abs(emp - density.bin_masses(edges))))


def follower_sigma2(sigma_xi: float, sigma_fl: Sequence[float], c_fl: Optional[Sequence[float]] = None) -> float:
    """sigma_F^2 = (sigma_xi^2 + sum_l w_l sigma_xi^l^2) / 2.

    With ``c_fl=None`` all weights are one.  Passing the follower-leader
    frequencies weights each group's noise by how often followers meet it,
    which is the variance the simulated dynamics actually accumulate.
    """
    s = np.asarray(sigma_fl, dtype=float) ** 2
    wts = np.ones_like(s) if c_fl is None else np.asarray(c_fl, dtype=float)
    return 0.5 * (sigma_xi ** 2 + float(np.sum(wts * s)))


@dataclass(frozen=True)
class StationaryParams:
    vbar: float
    sigma_F2: float
    b_L: tuple
    sigma_eta2: tuple

    def follower(self) -> StationaryDensity:
        return StationaryDensity.build(self.vbar, self.sigma_F2)

    def leader(self, k: int) -> StationaryDensity:
        return StationaryDensity.build(self.b_L[k], self.sigma_eta2[k])


def leader_shift(m_L_inf, strategies) -> np.ndarray:
    """b_L^k = m_L,inf^k + (1/M) sum_l psi^l (vbar^l - vbar)."""
    vbar = asymptotic_consensus(strategies)
    psi = np.array([s.psi for s in strategies])
    target = np.array([s.target for s in strategies])
    return np.asarray(m_L_inf, dtype=float) + np.mean(psi * (target - vbar))


def assumption_violations(scenario) -> list:
    """Conditions under which the closed-form steady states hold that the scenario breaks."""
    out = []
    M = scenario.M
    if scenario.mode != "homogeneous":
        out.append("mode must be homogeneous")
    if scenario.followers.kernel.kind != "unit":
        out.append("followers.kernel must be unit")
    if scenario.followers.diffusion.kind != "quadratic_cap":
        out.append("followers.diffusion must be quadratic_cap")
    for k, ld in enumerate(scenario.leaders):
        if ld.nu != 2 * M:
            out.append(f"leaders[{k}].nu must equal 2M = {2 * M}")
        if abs(ld.c_fl - 1.0 / M) > 1e-12:
            out.append(f"leaders[{k}].c_fl must equal 1/M")
        if ld.kernel.kind != "unit" or ld.fl_kernel.kind != "unit":
            out.append(f"leaders[{k}] kernels must be unit")
        if ld.diffusion.kind != "quadratic_cap" or ld.fl_diffusion.kind != "quadratic_cap":
            out.append(f"leaders[{k}] diffusions must be quadratic_cap")
    return out


def stationary_params(scenario, m_F0: float, m_L0, T: float = 40.0, weight_by_frequency: bool = True,
                      strict: bool = True) -> StationaryParams:
    """Steady-state parameters of a scenario started from the given means.

    The asymptotic leader means come from integrating the mean-opinion system
    to time ``T``.
    """
    bad = assumption_violations(scenario)
    if bad and strict:
        raise ConfigError("stationary: " + "; ".join(bad))
    strategies = scenario.strategies
    params = MeanSystemParams.from_scenario(scenario)
    _, _, m_L = integrate_means(m_F0, m_L0, params, T, scenario.epsilon)
    c_fl = [ld.c_fl for ld in scenario.leaders] if weight_by_frequency else None
    sF2 = follower_sigma2(scenario.followers.sigma, [ld.sigma_fl for ld in scenario.leaders], c_fl)
    return StationaryParams(
        vbar=asymptotic_consensus(strategies),
        sigma_F2=sF2,
        b_L=tuple(float(b) for b in leader_shift(m_L[-1], strategies)),
        sigma_eta2=tuple(ld.sigma ** 2 for ld in scenario.leaders),
    )

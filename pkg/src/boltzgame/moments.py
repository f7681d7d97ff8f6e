"""Mean-opinion ODE system and asymptotic consensus value.

Valid for symmetric P and S, R = 1 and a common control penalty:

    m_F' = sum_l c_FL^l rho^l alpha (m_L^l - m_F)
    m_L^k' = beta / (1 + (M - 1) beta) c_L^k rho^k sum_l (psi^l vbar^l + mu^l m_F - m_L^l)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .best_reply import StrategyParams
from .errors import ConfigError


@dataclass(frozen=True)
class MeanSystemParams:
    c_fl: np.ndarray
    c_l: np.ndarray
    rho: np.ndarray
    beta: float
    alpha: float
    strategies: tuple

    @property
    def M(self) -> int:
        return len(self.strategies)

    @classmethod
    def from_scenario(cls, scenario, rho=None) -> "MeanSystemParams":
        """Coefficients of a scenario under the quasi-invariant scaling.

        Frequencies become c_FL/(eps rho) and 1/(eps rho), alpha = eps and
        beta is built from the scaled common penalty eps nu.
        """
        nus = np.array([ld.nu for ld in scenario.leaders])
        if not np.all(nus == nus[0]):
            raise ConfigError("leaders.nu: the mean-opinion oracle needs a common penalty")
        eps = scenario.epsilon
        if rho is None:
            rho = np.array(scenario.leader_counts()) / scenario.n_followers
        rho = np.asarray(rho, dtype=float)
        c_fl = np.array([ld.c_fl for ld in scenario.leaders]) / (eps * rho)
        c_l = 1.0 / (eps * rho)
        nu = eps * nus[0]
        beta = 4.0 * eps ** 2 / (nu + 4.0 * eps ** 2)
        return cls(c_fl, c_l, rho, beta, eps, tuple(scenario.strategies))


def mean_rhs(m_F: float, m_L, params: MeanSystemParams):
    """Time derivatives (dm_F/dt, dm_L/dt) of the mean system."""
    m_L = np.asarray(m_L, dtype=float)
    psi = np.array([s.psi for s in params.strategies])
    target = np.array([s.target for s in params.strategies])
    dm_F = float(np.sum(params.c_fl * params.rho * params.alpha * (m_L - m_F)))
    drive = np.sum(psi * target + (1.0 - psi) * m_F - m_L)
    gain = params.beta / (1.0 + (params.M - 1) * params.beta)
    dm_L = gain * params.c_l * params.rho * drive
    return dm_F, dm_L


def integrate_means(m_F0: float, m_L0, params: MeanSystemParams, T: float, dt: float):
    """Classical RK4 with a fixed step; returns ``(t, m_F, m_L)`` arrays."""
    n = int(round(T / dt))
    y = np.concatenate([[m_F0], np.asarray(m_L0, dtype=float)])

    def f(y):
        a, b = mean_rhs(y[0], y[1:], params)
        return np.concatenate([[a], b])

    out = np.empty((n + 1, y.size))
    out[0] = y
    for i in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    t = np.arange(n + 1) * dt
    return t, out[:, 0], out[:, 1:]


def asymptotic_consensus(strategies: Sequence[StrategyParams]) -> float:
    """Consensus sum(psi vbar) / sum(psi) reached by both followers and leaders."""
    psi = np.array([s.psi for s in strategies])
    if not psi.sum() > 0:
        raise ValueError("all-populist strategies: consensus determined by initial data")
    return float(np.dot(psi, [s.target for s in strategies]) / psi.sum())


def settling_time(t, m_F, target: float, tol: float = 0.01) -> float:
    """First time after which |m_F - target| stays below ``tol`` on the given trajectory."""
    bad = np.flatnonzero(np.abs(np.asarray(m_F) - target) >= tol)
    if bad.size == 0:
        return float(t[0])
    if bad[-1] == len(t) - 1:
        return float("inf")
    return float(t[bad[-1] + 1])

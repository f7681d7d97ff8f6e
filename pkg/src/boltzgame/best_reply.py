"""Instantaneous best-reply controls of M competing leader groups.

Each step the controls solve the M x M system

    u^k + beta^k sum_{l != k} u^l = beta^k / (2 alpha) F^k,
    beta^k = 4 alpha^2 / (nu^k + 4 alpha^2),
    F^k = psi^k vbar^k + mu^k m_F - m_L^k,

whose matrix has a unit diagonal and beta^k on the rest of row k.  The leaders
are moved by the total control sum_k u^k, which only needs the column sums of
the inverse matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, IllPosedError


@dataclass(frozen=True)
class StrategyParams:
    """Radical weight ``psi``, control penalty ``nu`` and target opinion of a group."""

    psi: float
    nu: float
    target: float

    def __post_init__(self):
        if not 0.0 <= self.psi <= 1.0:
            raise ConfigError("strategy.psi: must lie in [0, 1]")
        if not self.nu > 0.0:
            raise ConfigError("strategy.nu: must be > 0")
        if not -1.0 <= self.target <= 1.0:
            raise ConfigError("strategy.target: must lie in [-1, 1]")

    @property
    def mu(self) -> float:
        return 1.0 - self.psi

    def scaled(self, epsilon: float) -> "StrategyParams":
        """Penalty rescaled as nu -> epsilon nu."""
        return StrategyParams(self.psi, self.nu * epsilon, self.target)


def is_well_posed(nus, alpha: float) -> bool:
    nus = np.asarray(nus, dtype=float)
    return bool(np.all(nus > 4.0 * (nus.size - 2) * alpha ** 2))


@dataclass(frozen=True)
class ControlSystem:
    alpha: float
    betas: np.ndarray
    matrix: np.ndarray
    inverse: np.ndarray
    col_sums: np.ndarray
    well_posed: bool

    @property
    def M(self) -> int:
        return self.betas.size

    def require_well_posed(self):
        if not self.well_posed:
            raise IllPosedError(
                "strategies: best-reply system is ill-posed, need nu^k > 4 (M - 2) alpha^2 "
                f"= {4.0 * (self.M - 2) * self.alpha ** 2:.6g}"
            )


def build_system(strategies: Sequence[StrategyParams], alpha: float) -> ControlSystem:
    """Assemble the best-reply matrix and cache its inverse and column sums.

    When the diagonal-dominance condition fails the system is returned with
    ``well_posed=False`` and no inverse; solving with it raises.
    """
    if len(strategies) < 1:
        raise ConfigError("strategies: need at least one leader group")
    if not alpha > 0:
        raise ConfigError("alpha: must be > 0")
    nus = np.array([s.nu for s in strategies], dtype=float)
    M = nus.size
    betas = 4.0 * alpha ** 2 / (nus + 4.0 * alpha ** 2)
    matrix = np.repeat(betas[:, None], M, axis=1)
    np.fill_diagonal(matrix, 1.0)
    well_posed = is_well_posed(nus, alpha)
    if well_posed:
        # LAPACK getrf/getrs: LU with partial pivoting
        inverse = np.linalg.solve(matrix, np.eye(M))
        col_sums = inverse.sum(axis=0)
    else:
        inverse = np.full((M, M), np.nan)
        col_sums = np.full(M, np.nan)
    return ControlSystem(alpha, betas, matrix, inverse, col_sums, well_posed)


def strategy_drift(strategies: Sequence[StrategyParams], m_F: float, m_L) -> np.ndarray:
    """F^k = psi^k vbar^k + mu^k m_F - m_L^k."""
    psi = np.array([s.psi for s in strategies])
    target = np.array([s.target for s in strategies])
    return psi * target + (1.0 - psi) * m_F - np.asarray(m_L, dtype=float)


def solve_controls(system: ControlSystem, drift) -> np.ndarray:
    """Individual best-reply controls u^k for the drifts F^k."""
    system.require_well_posed()
    rhs = system.betas * np.asarray(drift, dtype=float) / (2.0 * system.alpha)
    return system.inverse @ rhs


def total_control(system: ControlSystem, m_F: float, m_L, strategies) -> float:
    """sum_k u^k = 1/(2 alpha) sum_l beta^l Bbar^l F^l."""
    system.require_well_posed()
    F = strategy_drift(strategies, m_F, m_L)
    return float(np.dot(system.betas * system.col_sums, F) / (2.0 * system.alpha))


def equal_penalty_control(beta: float, alpha: float, M: int, drifts) -> float:
    """Closed-form total control when every group shares the same penalty."""
    return beta / (2.0 * alpha * (1.0 + (M - 1) * beta)) * float(np.sum(drifts))


def total_control_local(system: ControlSystem, v_h, v_p, m_F: float, strategies) -> float:
    """Total control with each group's mean replaced by a local pair average.

    ``v_h`` and ``v_p`` hold one pair opinion per group.
    """
    local = 0.5 * (np.asarray(v_h, dtype=float) + np.asarray(v_p, dtype=float))
    return total_control(system, m_F, local, strategies)


def limit_control(strategies: Sequence[StrategyParams], m_F: float, m_L) -> float:
    """Quasi-invariant limit sum_l (2 / nu^l) F^l, with unscaled penalties."""
    nus = np.array([s.nu for s in strategies])
    return float(np.sum(2.0 / nus * strategy_drift(strategies, m_F, m_L)))

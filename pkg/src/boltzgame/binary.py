"""Stochastic binary interaction rules with bound enforcement by rejection.

Every rule is vectorised over arrays of interacting pairs.  An interaction
whose post-states leave the domain is rejected as a whole: all participants
keep their pre-interaction states, bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError
from .kernels import CredibilitySpec, DiffusionSpec, KernelSpec, eval_D, eval_P, eval_R


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean uniform noise on [-h, h] with h = sqrt(3 variance)."""

    variance: float = 0.0

    def __post_init__(self):
        if not self.variance >= 0.0:
            raise ConfigError("noise.variance: must be >= 0")

    @classmethod
    def from_std(cls, sigma: float) -> "NoiseSpec":
        return cls(float(sigma) ** 2)

    @property
    def half_width(self) -> float:
        return math.sqrt(3.0 * self.variance)

    def support(self) -> tuple:
        return (-self.half_width, self.half_width)

    def scaled(self, factor: float) -> "NoiseSpec":
        """Noise with variance multiplied by ``factor``."""
        return NoiseSpec(self.variance * factor)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        h = self.half_width
        if h == 0.0:
            return np.zeros(size)
        return rng.uniform(-h, h, size)


class InteractionOutcome(NamedTuple):
    accepted: np.ndarray
    post: tuple


def _in_opinion_domain(v):
    return np.abs(v) <= 1.0


def follower_follower(w, w_star, x=None, x_star=None, *, alpha: float,
                      kernel: KernelSpec = KernelSpec(), diffusion: DiffusionSpec = DiffusionSpec(),
                      xi=0.0, xi_star=0.0) -> InteractionOutcome:
    """w' = w + alpha P(w, w*) (w* - w) + xi D(w), and symmetrically for w*."""
    w = np.asarray(w, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    p = eval_P(w, w_star, x, x_star, kernel)
    p_star = eval_P(w_star, w, x_star, x, kernel)
    w_new = w + alpha * p * (w_star - w) + xi * eval_D(w, diffusion)
    ws_new = w_star + alpha * p_star * (w - w_star) + xi_star * eval_D(w_star, diffusion)
    ok = _in_opinion_domain(w_new) & _in_opinion_domain(ws_new)
    return InteractionOutcome(ok, (np.where(ok, w_new, w), np.where(ok, ws_new, w_star)))


def follower_leader(w, v, x=None, *, alpha: float, opinion_kernel: KernelSpec = KernelSpec(),
                    credibility: Optional[CredibilitySpec] = None,
                    diffusion: DiffusionSpec = DiffusionSpec(), xi=0.0) -> InteractionOutcome:
    """w'' = w + alpha R(w, v; x) (v - w) + xi D(w); the leader is unchanged."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    r = eval_R(w, v, x, credibility, opinion_kernel)
    w_new = w + alpha * r * (v - w) + xi * eval_D(w, diffusion)
    ok = _in_opinion_domain(w_new)
    return InteractionOutcome(ok, (np.where(ok, w_new, w), v))


def leader_leader(v, v_star, *, alpha: float, shift, kernel: KernelSpec = KernelSpec(),
                  diffusion: DiffusionSpec = DiffusionSpec(), eta=0.0, eta_star=0.0) -> InteractionOutcome:
    """v' = v + alpha S(v, v*) (v* - v) + shift + eta D(v).

    ``shift`` is the control displacement ``2 alpha u`` (scalar or per pair).
    """
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    s = eval_P(v, v_star, spec=kernel)
    s_star = eval_P(v_star, v, spec=kernel)
    v_new = v + alpha * s * (v_star - v) + shift + eta * eval_D(v, diffusion)
    vs_new = v_star + alpha * s_star * (v - v_star) + shift + eta_star * eval_D(v_star, diffusion)
    ok = _in_opinion_domain(v_new) & _in_opinion_domain(vs_new)
    return InteractionOutcome(ok, (np.where(ok, v_new, v), np.where(ok, vs_new, v_star)))


def knowledge_update(x, x_star, z, *, alpha: float, lam: float, lam_c: float, lam_b: float, kappa=0.0):
    """x' = (1 - alpha lam) x + alpha lam_C x* + alpha lam_B z + kappa x (no admissibility)."""
    x = np.asarray(x, dtype=float)
    return (1.0 - alpha * lam) * x + alpha * lam_c * np.asarray(x_star, dtype=float) + alpha * lam_b * z + kappa * x


def knowledge_exchange(x, x_star, z, *, alpha: float, lam: float, lam_c: float, lam_b: float,
                       kappa=0.0, kappa_star=0.0) -> InteractionOutcome:
    """Knowledge exchange of a pair sharing one background sample ``z``."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    x_new = knowledge_update(x, x_star, z, alpha=alpha, lam=lam, lam_c=lam_c, lam_b=lam_b, kappa=kappa)
    xs_new = knowledge_update(x_star, x, z, alpha=alpha, lam=lam, lam_c=lam_c, lam_b=lam_b, kappa=kappa_star)
    ok = (x_new >= 0.0) & (xs_new >= 0.0)
    return InteractionOutcome(ok, (np.where(ok, x_new, x), np.where(ok, xs_new, x_star)))

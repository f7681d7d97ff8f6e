"""Followers carrying a knowledge coordinate next to their opinion."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .binary import InteractionOutcome, NoiseSpec, follower_follower, knowledge_exchange
from .errors import ConfigError
from .kernels import DiffusionSpec, KernelSpec


@dataclass(frozen=True)
class KnowledgeParams:
    """Knowledge exchange rates, background law U(0, z_max) and noise.

    ``sigma_kappa`` is the unscaled standard deviation of the multiplicative
    noise; ``init_low``/``init_high`` give the uniform initial knowledge law.
    """

    lam: float
    lam_c: float
    lam_b: float
    sigma_kappa: float = 0.0
    z_max: float = 10.0
    lam_minus: Optional[float] = None
    lam_plus: Optional[float] = None
    init_low: float = 0.0
    init_high: float = 1.0
    x_max: Optional[float] = None

    def __post_init__(self):
        lo = self.lam if self.lam_minus is None else self.lam_minus
        hi = self.lam if self.lam_plus is None else self.lam_plus
        if not (0.0 < lo <= self.lam <= hi < 1.0):
            raise ConfigError("knowledge.lam: need 0 < lam_minus <= lam <= lam_plus < 1")
        for name in ("lam_c", "lam_b"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"knowledge.{name}: must lie in [0, 1]")
        if self.sigma_kappa < 0 or self.z_max < 0:
            raise ConfigError("knowledge: sigma_kappa and z_max must be >= 0")
        if not 0.0 <= self.init_low <= self.init_high:
            raise ConfigError("knowledge.init: need 0 <= init_low <= init_high")

    @property
    def upper_rate(self) -> float:
        return self.lam if self.lam_plus is None else self.lam_plus

    @property
    def background_mean(self) -> float:
        return 0.5 * self.z_max

    @property
    def mean_fixed_point(self) -> float:
        """lam_B m_B / (lam - lam_C): fixed point of the mean knowledge recursion."""
        if not self.lam > self.lam_c:
            return np.inf
        return self.lam_b * self.background_mean / (self.lam - self.lam_c)

    @property
    def display_max(self) -> float:
        if self.x_max is not None:
            return self.x_max
        fp = self.mean_fixed_point
        return 2.0 * fp if np.isfinite(fp) and fp > 0 else max(self.z_max, self.init_high, 1.0)

    def kappa_noise(self, epsilon: float) -> NoiseSpec:
        """Knowledge noise with the standard deviation rescaled by epsilon."""
        return NoiseSpec.from_std(epsilon * self.sigma_kappa)

    def check_positivity(self, epsilon: float):
        lo, _ = self.kappa_noise(epsilon).support()
        if lo < -1.0 + self.upper_rate:
            raise ConfigError(
                "knowledge.sigma_kappa: noise support violates kappa >= -1 + lam_plus"
            )

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def hetero_pair_update(w, w_star, x, x_star, z, *, alpha: float, kernel: KernelSpec,
                       diffusion: DiffusionSpec, knowledge: KnowledgeParams,
                       xi=0.0, xi_star=0.0, kappa=0.0, kappa_star=0.0) -> InteractionOutcome:
    """Joint opinion and knowledge exchange of follower pairs.

    Both coordinates are computed from the same pre-interaction states and
    accepted or rejected together.  ``post`` is ``(w', w*', x', x*')``.
    """
    op = follower_follower(w, w_star, x, x_star, alpha=alpha, kernel=kernel,
                           diffusion=diffusion, xi=xi, xi_star=xi_star)
    kn = knowledge_exchange(x, x_star, z, alpha=alpha, lam=knowledge.lam, lam_c=knowledge.lam_c,
                            lam_b=knowledge.lam_b, kappa=kappa, kappa_star=kappa_star)
    ok = op.accepted & kn.accepted
    w = np.asarray(w, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    post = (
        np.where(ok, op.post[0], w),
        np.where(ok, op.post[1], w_star),
        np.where(ok, kn.post[0], x),
        np.where(ok, kn.post[1], x_star),
    )
    return InteractionOutcome(ok, post)


def hetero_step_phase(opinions, knowledge, pairs, rng: np.random.Generator, *, alpha: float,
                      kernel: KernelSpec, diffusion: DiffusionSpec, noise: NoiseSpec,
                      params: KnowledgeParams, kappa_noise: NoiseSpec) -> int:
    """Apply the follower-follower phase in place to the index pairs ``pairs``.

    ``pairs`` is a ``(2, K)`` integer array of disjoint partners.  Returns the
    number of rejected pairs.
    """
    i, j = pairs
    k = i.size
    xi = noise.sample(rng, (2, k))
    z = rng.uniform(0.0, params.z_max, k)
    kap = kappa_noise.sample(rng, (2, k))
    out = hetero_pair_update(opinions[i], opinions[j], knowledge[i], knowledge[j], z,
                             alpha=alpha, kernel=kernel, diffusion=diffusion, knowledge=params,
                             xi=xi[0], xi_star=xi[1], kappa=kap[0], kappa_star=kap[1])
    opinions[i], opinions[j], knowledge[i], knowledge[j] = out.post
    return int(k - np.count_nonzero(out.accepted))


def knowledge_quartile_stats(opinions, knowledge) -> dict:
    """Mean opinion and mean knowledge within each knowledge quartile.

    Quartile 0 holds the least knowledgeable followers.
    """
    opinions = np.asarray(opinions, dtype=float)
    knowledge = np.asarray(knowledge, dtype=float)
    order = np.argsort(knowledge, kind="stable")
    groups = np.array_split(order, 4)
    return {
        "opinion_mean": np.array([opinions[g].mean() for g in groups]),
        "knowledge_mean": np.array([knowledge[g].mean() for g in groups]),
        "knowledge_edges": np.quantile(knowledge, [0.0, 0.25, 0.5, 0.75, 1.0]),
    }

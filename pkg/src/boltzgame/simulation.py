"""Direct Monte Carlo simulation of the leader-follower Boltzmann game.

One time step of size dt = epsilon (the quasi-invariant scaling, alpha =
epsilon) runs the phases

1. freeze the population means,
2. compute the leaders' control from the frozen means,
3. shuffle followers into disjoint pairs; every pair interacts,
4. for each group, every follower meets a random leader with probability c_FL,
5. shuffle each leader group into disjoint pairs; every pair interacts.

Random numbers come from Philox streams keyed by (seed, step, phase, group,
chunk), so results do not depend on the number of worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from . import best_reply as br
from .binary import NoiseSpec, follower_follower, follower_leader, leader_leader
from .errors import DomainError
from .hetero import hetero_step_phase
from .kernels import CredibilitySpec
from .scenario import LeaderConfig, Scenario

CHUNK = 1 << 15

_INIT, _FF_PAIR, _FF, _FL, _LL_PAIR, _LL = range(6)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class ScalingConfig:
    """Quasi-invariant scaling: alpha = dt = epsilon, sigma^2 -> epsilon sigma^2, nu -> epsilon nu.

    The frequencies c_F -> 1/epsilon, c_FL -> c_FL/(epsilon rho), c_L ->
    1/(epsilon rho) turn into per-step interaction probabilities 1, c_FL and 1.
    """

    epsilon: float

    @property
    def alpha(self) -> float:
        return self.epsilon

    @property
    def dt(self) -> float:
        return self.epsilon

    def noise(self, sigma: float) -> NoiseSpec:
        return NoiseSpec.from_std(sigma).scaled(self.epsilon)

    def nu(self, nu: float) -> float:
        return self.epsilon * nu

    def strategies(self, strategies) -> List[br.StrategyParams]:
        return [s.scaled(self.epsilon) for s in strategies]

    @staticmethod
    def follower_leader_probability(c_fl: float) -> float:
        return c_fl


@dataclass
class FollowerEnsemble:
    opinions: np.ndarray
    knowledge: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.opinions.size


@dataclass
class LeaderGroup:
    opinions: np.ndarray
    config: LeaderConfig
    rho: float
    m_L0: float
    credibility: Optional[CredibilitySpec] = None

    @property
    def strategy(self) -> br.StrategyParams:
        return self.config.strategy


@dataclass(frozen=True)
class MomentState:
    t: float
    m_F: float
    m_L: tuple
    E_F: float
    E_L: tuple

    def as_row(self) -> list:
        return [self.t, self.m_F, *self.m_L, self.E_F, *self.E_L]


def estimate_moments(followers: FollowerEnsemble, leaders, t: float = 0.0) -> MomentState:
    w = followers.opinions
    return MomentState(
        t=t,
        m_F=float(np.mean(w)),
        m_L=tuple(float(np.mean(g.opinions)) for g in leaders),
        E_F=float(np.mean(w * w)),
        E_L=tuple(float(np.mean(g.opinions * g.opinions)) for g in leaders),
    )


@dataclass
class Histogram:
    edges: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def mass(self) -> float:
        return float(np.sum(self.density * self.widths))


@dataclass
class Grid:
    """Density on knowledge x opinion cells; ``density[i, j]`` is knowledge bin i, opinion bin j."""

    x_edges: np.ndarray
    w_edges: np.ndarray
    density: np.ndarray

    def mass(self) -> float:
        cell = np.outer(np.diff(self.x_edges), np.diff(self.w_edges))
        return float(np.sum(self.density * cell))


def histogram(values, bins: int = 50, range_=(-1.0, 1.0)) -> Histogram:
    """Density histogram integrating to one over ``range_``; overflow lands in the edge bins."""
    values = np.clip(np.asarray(values, dtype=float), range_[0], range_[1])
    counts, edges = np.histogram(values, bins=bins, range=range_)
    return Histogram(edges, counts / (values.size * np.diff(edges)))


def density_grid(opinions, knowledge, bins: int = 50, x_max: float = 10.0) -> Grid:
    """2-D density with the knowledge axis truncated at ``x_max`` (overflow in the last bin)."""
    x = np.clip(np.asarray(knowledge, dtype=float), 0.0, x_max)
    counts, x_edges, w_edges = np.histogram2d(x, opinions, bins=bins, range=[[0.0, x_max], [-1.0, 1.0]])
    cell = np.outer(np.diff(x_edges), np.diff(w_edges))
    return Grid(x_edges, w_edges, counts / (x.size * cell))


@dataclass
class Snapshot:
    t: float
    followers: Histogram
    leaders: List[Histogram]
    grid: Optional[Grid] = None
    quartiles: Optional[dict] = None


@dataclass
class RunRecord:
    scenario: Scenario
    moments: np.ndarray  # rows: t, m_F, m_L^1..M, E_F, E_L^1..M
    snapshots: List[Snapshot]
    attempts: Dict[str, int]
    rejections: Dict[str, int]
    followers: FollowerEnsemble
    leaders: List[LeaderGroup]

    @property
    def t(self) -> np.ndarray:
        return self.moments[:, 0]

    @property
    def m_F(self) -> np.ndarray:
        return self.moments[:, 1]

    @property
    def m_L(self) -> np.ndarray:
        M = self.scenario.M
        return self.moments[:, 2:2 + M]

    def rejection_rate(self, rule: str) -> float:
        n = self.attempts.get(rule, 0)
        return self.rejections.get(rule, 0) / n if n else 0.0


def init(scenario: Scenario, seed: Optional[int] = None):
    """Draw the initial particle ensembles of a validated scenario."""
    seed = scenario.seed if seed is None else seed
    rng = _rng(seed, 0, _INIT)
    n_f = scenario.n_followers
    followers = FollowerEnsemble(scenario.followers.init.sample(rng, n_f))
    if scenario.mode == "heterogeneous":
        kp = scenario.knowledge
        followers.knowledge = rng.uniform(kp.init_low, kp.init_high, n_f)
    leaders = []
    for cfg, n_k in zip(scenario.leaders, scenario.leader_counts()):
        v = cfg.init.sample(rng, n_k)
        m0 = float(np.mean(v))
        cred = None
        if cfg.credibility is not None:
            cred = CredibilitySpec(cfg.credibility["varsigma"], cfg.credibility["gamma"],
                                   anchor=m0, a=cfg.credibility["a"])
        leaders.append(LeaderGroup(v, cfg, n_k / n_f, m0, cred))
    return followers, leaders


class Simulator:
    """Stateful time stepper for one scenario and seed."""

    def __init__(self, scenario: Scenario, seed: Optional[int] = None, threads: int = 1):
        self.scenario = scenario.validate()
        self.seed = scenario.seed if seed is None else int(seed)
        self.scaling = ScalingConfig(scenario.epsilon)
        self.threads = max(1, int(threads))
        self.followers, self.leaders = init(scenario, self.seed)
        self.n = 0
        sc = self.scaling
        self.strategies = scenario.strategies
        self.scaled_strategies = sc.strategies(self.strategies)
        self.system = br.build_system(self.scaled_strategies, sc.alpha)
        if scenario.control in ("game", "local_average"):
            self.system.require_well_posed()
        self.f_noise = sc.noise(scenario.followers.sigma)
        self.fl_noise = [sc.noise(ld.sigma_fl) for ld in scenario.leaders]
        self.l_noise = [sc.noise(ld.sigma) for ld in scenario.leaders]
        self.kappa_noise = scenario.knowledge.kappa_noise(sc.epsilon) if scenario.knowledge else None
        self.attempts = {"follower_follower": 0, "follower_leader": 0, "leader_leader": 0}
        self.rejections = dict.fromkeys(self.attempts, 0)
        self._pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None

    @property
    def t(self) -> float:
        return self.n * self.scaling.dt

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def moments(self) -> MomentState:
        return estimate_moments(self.followers, self.leaders, self.t)

    def _map(self, fn, items) -> int:
        if self._pool is None:
            return sum(fn(it) for it in items)
        return sum(self._pool.map(fn, items))

    def control_shifts(self, m: MomentState) -> np.ndarray:
        """Per-group displacement 2 alpha u applied to each leader pair."""
        alpha = self.scaling.alpha
        M = self.scenario.M
        kind = self.scenario.control
        if kind in ("game", "local_average"):
            return np.full(M, 2.0 * alpha * br.total_control(self.system, m.m_F, m.m_L, self.scaled_strategies))
        if kind == "control_only":
            drift = br.strategy_drift(self.scaled_strategies, m.m_F, m.m_L)
            return self.system.betas * drift
        return np.full(M, 2.0 * alpha * br.limit_control(self.strategies, m.m_F, m.m_L))

    def step(self) -> MomentState:
        sc = self.scenario
        alpha = self.scaling.alpha
        key = self.n + 1
        m = self.moments()
        shifts = self.control_shifts(m)

        # follower-follower pairs
        w = self.followers.opinions
        x = self.followers.knowledge
        perm = _rng(self.seed, key, _FF_PAIR).permutation(w.size)
        n_pairs = w.size // 2
        pi, pj = perm[0:2 * n_pairs:2], perm[1:2 * n_pairs:2]
        fcfg = sc.followers

        def ff_chunk(c):
            sl = slice(c * CHUNK, min((c + 1) * CHUNK, n_pairs))
            i, j = pi[sl], pj[sl]
            rng = _rng(self.seed, key, _FF, 0, c)
            if x is not None:
                return hetero_step_phase(w, x, (i, j), rng, alpha=alpha, kernel=fcfg.kernel,
                                         diffusion=fcfg.diffusion, noise=self.f_noise,
                                         params=sc.knowledge, kappa_noise=self.kappa_noise)
            xi = self.f_noise.sample(rng, (2, i.size))
            out = follower_follower(w[i], w[j], alpha=alpha, kernel=fcfg.kernel,
                                    diffusion=fcfg.diffusion, xi=xi[0], xi_star=xi[1])
            w[i], w[j] = out.post
            return int(i.size - np.count_nonzero(out.accepted))

        self.rejections["follower_follower"] += self._map(ff_chunk, range(-(-n_pairs // CHUNK)))
        self.attempts["follower_follower"] += n_pairs

        # follower-leader encounters, one group after the other
        for k, group in enumerate(self.leaders):
            cfg = group.config
            prob = self.scaling.follower_leader_probability(cfg.c_fl)
            noise = self.fl_noise[k]
            v_all = group.opinions

            def fl_chunk(c):
                lo, hi = c * CHUNK, min((c + 1) * CHUNK, w.size)
                rng = _rng(self.seed, key, _FL, k, c)
                meet = rng.random(hi - lo) < prob
                idx = lo + np.flatnonzero(meet)
                partner = rng.integers(0, v_all.size, idx.size)
                xi = noise.sample(rng, idx.size)
                out = follower_leader(w[idx], v_all[partner], None if x is None else x[idx],
                                      alpha=alpha, opinion_kernel=cfg.fl_kernel,
                                      credibility=group.credibility, diffusion=cfg.fl_diffusion, xi=xi)
                w[idx] = out.post[0]
                return (idx.size, int(idx.size - np.count_nonzero(out.accepted)))

            chunks = range(-(-w.size // CHUNK))
            if self._pool is None:
                res = [fl_chunk(c) for c in chunks]
            else:
                res = list(self._pool.map(fl_chunk, chunks))
            self.attempts["follower_leader"] += sum(r[0] for r in res)
            self.rejections["follower_leader"] += sum(r[1] for r in res)

        # leader-leader pairs within each group
        for k, group in enumerate(self.leaders):
            cfg = group.config
            v = group.opinions
            perm = _rng(self.seed, key, _LL_PAIR, k).permutation(v.size)
            n_lp = v.size // 2
            i, j = perm[0:2 * n_lp:2], perm[1:2 * n_lp:2]
            rng = _rng(self.seed, key, _LL, k, 0)
            eta = self.l_noise[k].sample(rng, (2, n_lp))
            shift = shifts[k]
            if sc.control == "local_average":
                local = 0.5 * (v[i] + v[j])
                shift = shift + self.system.betas[k] * self.system.col_sums[k] * (m.m_L[k] - local)
            out = leader_leader(v[i], v[j], alpha=alpha, shift=shift, kernel=cfg.kernel,
                                diffusion=cfg.diffusion, eta=eta[0], eta_star=eta[1])
            v[i], v[j] = out.post
            self.attempts["leader_leader"] += n_lp
            self.rejections["leader_leader"] += int(n_lp - np.count_nonzero(out.accepted))

        self.n += 1
        self.check_domain()
        return m

    def check_domain(self):
        if np.any(np.abs(self.followers.opinions) > 1.0):
            raise DomainError(f"follower opinion left [-1, 1] at step {self.n}")
        if self.followers.knowledge is not None and np.any(self.followers.knowledge < 0.0):
            raise DomainError(f"negative follower knowledge at step {self.n}")
        for k, g in enumerate(self.leaders):
            if np.any(np.abs(g.opinions) > 1.0):
                raise DomainError(f"leader opinion of group {k} left [-1, 1] at step {self.n}")

    def snapshot(self) -> Snapshot:
        sc = self.scenario
        fh = histogram(self.followers.opinions, sc.bins)
        lh = [histogram(g.opinions, sc.bins) for g in self.leaders]
        grid = quart = None
        if self.followers.knowledge is not None:
            from .hetero import knowledge_quartile_stats

            grid = density_grid(self.followers.opinions, self.followers.knowledge, sc.bins,
                                sc.knowledge.display_max)
            quart = knowledge_quartile_stats(self.followers.opinions, self.followers.knowledge)
        return Snapshot(self.t, fh, lh, grid, quart)


def run(scenario: Scenario, seed: Optional[int] = None, threads: int = 1, progress=None) -> RunRecord:
    """Iterate T / epsilon steps, recording moments every step and snapshots on schedule."""
    if seed is not None:
        scenario = scenario.with_(seed=int(seed))
    sim = Simulator(scenario, threads=threads)
    n_steps = scenario.n_steps
    snap_steps = {int(round(t / scenario.epsilon)) for t in scenario.snapshots}
    rows = []
    snaps = []
    try:
        for n in range(n_steps):
            if n in snap_steps:
                snaps.append(sim.snapshot())
            rows.append(sim.step().as_row())
            if progress is not None:
                progress(n + 1, n_steps)
        rows.append(sim.moments().as_row())
        if n_steps in snap_steps:
            snaps.append(sim.snapshot())
    finally:
        sim.close()
    return RunRecord(scenario, np.array(rows), snaps, dict(sim.attempts), dict(sim.rejections),
                     sim.followers, sim.leaders)

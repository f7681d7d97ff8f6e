"""Scenario configuration: schema, validation, YAML round-trip and presets.

A scenario file is YAML with the keys of :meth:`Scenario.to_dict`; see the
README for an annotated example.  Noise levels are given as unscaled standard
deviations, penalties as unscaled ``nu``; the quasi-invariant scaling with
``epsilon`` is applied by the simulator.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from .best_reply import StrategyParams, is_well_posed
from .binary import NoiseSpec
from .errors import ConfigError, IllPosedError
from .hetero import KnowledgeParams
from .kernels import DiffusionSpec, KernelSpec, admissible_noise_bounds

MODES = ("homogeneous", "heterogeneous")
CONTROLS = ("game", "control_only", "local_average", "limit")


@dataclass(frozen=True)
class InitLaw:
    """Initial opinion law: ``uniform(low, high)`` or ``normal(mean, std)`` truncated to [-1, 1]."""

    law: str = "uniform"
    low: float = -1.0
    high: float = 1.0
    mean: float = 0.0
    std: float = 0.1

    def __post_init__(self):
        if self.law == "uniform":
            if not -1.0 <= self.low <= self.high <= 1.0:
                raise ConfigError("init: uniform law needs -1 <= low <= high <= 1")
        elif self.law == "normal":
            if not -1.0 <= self.mean <= 1.0 or not self.std >= 0.0:
                raise ConfigError("init: normal law needs mean in [-1, 1] and std >= 0")
        else:
            raise ConfigError(f"init.law: unknown law {self.law!r}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.law == "uniform":
            return rng.uniform(self.low, self.high, n)
        out = rng.normal(self.mean, self.std, n)
        bad = np.abs(out) > 1.0
        while bad.any():
            out[bad] = rng.normal(self.mean, self.std, int(bad.sum()))
            bad = np.abs(out) > 1.0
        return out

    def to_dict(self) -> dict:
        if self.law == "uniform":
            return {"law": "uniform", "low": self.low, "high": self.high}
        return {"law": "normal", "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class FollowerConfig:
    kernel: KernelSpec = KernelSpec()
    sigma: float = 0.0
    diffusion: DiffusionSpec = DiffusionSpec()
    init: InitLaw = InitLaw()

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.to_dict(), "sigma": self.sigma,
                "diffusion": self.diffusion.to_dict(), "init": self.init.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "FollowerConfig":
        d = dict(d)
        return cls(
            kernel=KernelSpec.from_dict(d.pop("kernel", {"kind": "unit"})),
            sigma=float(d.pop("sigma", 0.0)),
            diffusion=DiffusionSpec.from_dict(d.pop("diffusion", {})),
            init=InitLaw(**d.pop("init", {})),
            **_no_extra(d, "followers"),
        )


@dataclass(frozen=True)
class LeaderConfig:
    """One leader group.

    ``kernel`` is the within-group compromise S, ``fl_kernel`` the opinion
    factor H of the follower-leader kernel R, ``sigma`` the leader noise and
    ``sigma_fl`` the follower-leader noise.  ``credibility`` holds
    ``varsigma``, ``gamma`` and ``a`` in heterogeneous runs.
    """

    target: float
    psi: float
    nu: float
    sigma: float = 0.0
    kernel: KernelSpec = KernelSpec()
    fl_kernel: KernelSpec = KernelSpec()
    c_fl: float = 0.1
    sigma_fl: float = 0.0
    diffusion: DiffusionSpec = DiffusionSpec()
    fl_diffusion: DiffusionSpec = DiffusionSpec()
    init: InitLaw = InitLaw("normal", mean=0.0, std=0.05)
    credibility: Optional[dict] = None
    weight: float = 1.0

    @property
    def strategy(self) -> StrategyParams:
        return StrategyParams(self.psi, self.nu, self.target)

    def to_dict(self) -> dict:
        d = {
            "target": self.target, "psi": self.psi, "nu": self.nu, "sigma": self.sigma,
            "kernel": self.kernel.to_dict(), "fl_kernel": self.fl_kernel.to_dict(),
            "c_fl": self.c_fl, "sigma_fl": self.sigma_fl,
            "diffusion": self.diffusion.to_dict(), "fl_diffusion": self.fl_diffusion.to_dict(),
            "init": self.init.to_dict(), "weight": self.weight,
        }
        if self.credibility is not None:
            d["credibility"] = dict(self.credibility)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LeaderConfig":
        d = dict(d)
        kw = dict(
            target=float(d.pop("target")), psi=float(d.pop("psi")), nu=float(d.pop("nu")),
            sigma=float(d.pop("sigma", 0.0)),
            kernel=KernelSpec.from_dict(d.pop("kernel", {"kind": "unit"})),
            fl_kernel=KernelSpec.from_dict(d.pop("fl_kernel", {"kind": "unit"})),
            c_fl=float(d.pop("c_fl", 0.1)), sigma_fl=float(d.pop("sigma_fl", 0.0)),
            diffusion=DiffusionSpec.from_dict(d.pop("diffusion", {})),
            fl_diffusion=DiffusionSpec.from_dict(d.pop("fl_diffusion", {})),
            weight=float(d.pop("weight", 1.0)),
        )
        if "init" in d:
            kw["init"] = InitLaw(**d.pop("init"))
        cred = d.pop("credibility", None)
        if cred is not None:
            kw["credibility"] = {k: float(v) for k, v in cred.items()}
        _no_extra(d, "leader")
        return cls(**kw)


def _no_extra(d: dict, where: str) -> dict:
    if d:
        raise ConfigError(f"{where}: unexpected keys {sorted(d)}")
    return {}


@dataclass(frozen=True)
class Scenario:
    name: str = "custom"
    mode: str = "homogeneous"
    control: str = "game"
    epsilon: float = 0.01
    T: float = 1.0
    n_followers: int = 10_000
    leader_share: float = 0.1
    followers: FollowerConfig = FollowerConfig()
    leaders: tuple = ()
    knowledge: Optional[KnowledgeParams] = None
    snapshots: tuple = ()
    bins: int = 50
    seed: int = 0

    @property
    def M(self) -> int:
        return len(self.leaders)

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.epsilon))

    @property
    def strategies(self) -> List[StrategyParams]:
        return [ld.strategy for ld in self.leaders]

    def leader_counts(self) -> List[int]:
        """Even particle counts per group from the leader share and group weights."""
        total = self.n_followers * self.leader_share / (1.0 - self.leader_share)
        w = np.array([ld.weight for ld in self.leaders], dtype=float)
        raw = total * w / w.sum()
        return [max(2, 2 * int(round(r / 2.0))) for r in raw]

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def validate(self) -> "Scenario":
        """Check every cross-field constraint; raises ConfigError naming the field."""
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}")
        if self.control not in CONTROLS:
            raise ConfigError(f"control: must be one of {CONTROLS}")
        eps = self.epsilon
        if not 0.0 < eps < 1.0:
            raise ConfigError("epsilon: must lie in (0, 1)")
        if not self.T > 0:
            raise ConfigError("T: must be > 0")
        if self.n_followers < 2:
            raise ConfigError("n_followers: must be >= 2")
        if not 0.0 < self.leader_share < 1.0:
            raise ConfigError("leader_share: must lie in (0, 1)")
        if self.M < 1:
            raise ConfigError("leaders: need at least one group")
        if self.bins < 1:
            raise ConfigError("bins: must be >= 1")
        for t in self.snapshots:
            if not 0.0 <= t <= self.T + 1e-12:
                raise ConfigError(f"snapshots: time {t} outside [0, T]")

        hetero = self.mode == "heterogeneous"
        if hetero and self.knowledge is None:
            raise ConfigError("knowledge: required in heterogeneous mode")
        if not hetero and self.knowledge is not None:
            raise ConfigError("knowledge: only allowed in heterogeneous mode")
        if not hetero and self.followers.kernel.uses_knowledge:
            raise ConfigError("followers.kernel: knowledge-dependent kernel requires heterogeneous mode")

        alpha = eps
        _check_noise("followers.sigma", self.followers.sigma, eps,
                     admissible_noise_bounds(self.followers.diffusion, alpha, rule="follower"))
        for k, ld in enumerate(self.leaders):
            where = f"leaders[{k}]"
            try:
                ld.strategy
            except ConfigError as exc:
                raise ConfigError(f"{where}: {exc}") from None
            if ld.weight <= 0:
                raise ConfigError(f"{where}.weight: must be > 0")
            if not 0.0 < ld.c_fl <= 1.0:
                raise ConfigError(f"{where}.c_fl: must lie in (0, 1] so the scaled step probability is valid")
            if ld.fl_kernel.uses_knowledge or ld.kernel.uses_knowledge:
                raise ConfigError(f"{where}: leader kernels take opinions only; use credibility")
            if ld.credibility is not None:
                if not hetero:
                    raise ConfigError(f"{where}.credibility: only allowed in heterogeneous mode")
                missing = {"varsigma", "gamma", "a"} - set(ld.credibility)
                if missing:
                    raise ConfigError(f"{where}.credibility: missing {sorted(missing)}")
                if not (ld.credibility["varsigma"] > 0 and ld.credibility["gamma"] > 0
                        and ld.credibility["a"] > 1):
                    raise ConfigError(f"{where}.credibility: need varsigma > 0, gamma > 0, a > 1")
            _check_noise(f"{where}.sigma_fl", ld.sigma_fl, eps,
                         admissible_noise_bounds(ld.fl_diffusion, alpha, rule="follower_leader"))
            _check_noise(f"{where}.sigma", ld.sigma, eps,
                         admissible_noise_bounds(ld.diffusion, alpha, rule="leader"))
        if hetero:
            try:
                self.knowledge.check_positivity(eps)
            except ConfigError as exc:
                raise ConfigError(f"{exc}") from None

        nus = np.array([ld.nu for ld in self.leaders])
        if self.control in ("game", "local_average") and not is_well_posed(eps * nus, alpha):
            raise IllPosedError(
                "leaders.nu: best-reply system ill-posed, need nu^k > 4 (M - 2) epsilon "
                f"(= {4 * (self.M - 2) * eps:.6g}) for every group"
            )
        if self.M >= 2:
            bound = np.sqrt(eps * nus / (self.M - 1))
            if np.any(eps >= bound):
                raise ConfigError(
                    "epsilon: time step violates dt < sqrt(nu^k / (M - 1)) for the scaled penalties "
                    f"(bound {bound.min():.6g})"
                )
        return self

    def to_dict(self) -> dict:
        d = {
            "name": self.name, "mode": self.mode, "control": self.control,
            "epsilon": self.epsilon, "T": self.T, "n_followers": self.n_followers,
            "leader_share": self.leader_share, "seed": self.seed, "bins": self.bins,
            "snapshots": list(self.snapshots),
            "followers": self.followers.to_dict(),
            "leaders": [ld.to_dict() for ld in self.leaders],
        }
        if self.knowledge is not None:
            d["knowledge"] = self.knowledge.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        d = copy.deepcopy(d)
        try:
            followers = FollowerConfig.from_dict(d.pop("followers", {}))
        except (ConfigError, TypeError) as exc:
            raise ConfigError(f"followers: {exc}") from None
        leaders = []
        for k, ld in enumerate(d.pop("leaders", [])):
            try:
                leaders.append(LeaderConfig.from_dict(ld))
            except (ConfigError, TypeError, KeyError) as exc:
                raise ConfigError(f"leaders[{k}]: {exc}") from None
        knowledge = d.pop("knowledge", None)
        if knowledge is not None:
            try:
                knowledge = KnowledgeParams(**knowledge)
            except (ConfigError, TypeError) as exc:
                raise ConfigError(f"knowledge: {exc}") from None
        kw = {}
        for key, conv in (("name", str), ("mode", str), ("control", str), ("epsilon", float),
                          ("T", float), ("n_followers", int), ("leader_share", float),
                          ("bins", int), ("seed", int)):
            if key in d:
                try:
                    kw[key] = conv(d.pop(key))
                except (TypeError, ValueError):
                    raise ConfigError(f"{key}: cannot convert to {conv.__name__}") from None
        snapshots = tuple(float(t) for t in d.pop("snapshots", ()))
        _no_extra(d, "scenario")
        return cls(followers=followers, leaders=tuple(leaders), knowledge=knowledge,
                   snapshots=snapshots, **kw)


def _check_noise(field_name: str, sigma: float, epsilon: float, bounds: tuple):
    if sigma < 0:
        raise ConfigError(f"{field_name}: must be >= 0")
    lo, hi = NoiseSpec.from_std(sigma).scaled(epsilon).support()
    if lo < bounds[0] or hi > bounds[1]:
        raise ConfigError(
            f"{field_name}: scaled noise support [{lo:.6g}, {hi:.6g}] exceeds the "
            f"bound-preserving interval [{bounds[0]:.6g}, {bounds[1]:.6g}]"
        )


def dump_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario.to_dict(), sort_keys=False))


def load_scenario(path) -> Scenario:
    """Read and validate a YAML scenario file."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("parse error: top level must be a mapping")
    return Scenario.from_dict(data).validate()


# --- presets ---------------------------------------------------------------

def _test1() -> Scenario:
    bc = KernelSpec.bounded_confidence(0.75)
    leaders = tuple(
        LeaderConfig(target=t, psi=0.5, nu=0.1, sigma=0.01, kernel=KernelSpec.unit(), fl_kernel=bc,
                     c_fl=0.1, sigma_fl=0.01, init=InitLaw("normal", mean=-t, std=0.05))
        for t in (0.5, -0.5)
    )
    return Scenario(
        name="test1", epsilon=0.01, T=10.0, n_followers=100_000,
        followers=FollowerConfig(kernel=bc, sigma=0.01, init=InitLaw("uniform", -1.0, 1.0)),
        leaders=leaders, snapshots=(0.0, 1.0, 5.0, 10.0),
    )


def _test2(nus, name) -> Scenario:
    bc = KernelSpec.bounded_confidence(0.25)
    leaders = tuple(
        LeaderConfig(target=t, psi=p, nu=n, sigma=0.01, kernel=KernelSpec.unit(), fl_kernel=bc,
                     c_fl=0.1, sigma_fl=0.01, init=InitLaw("normal", mean=t, std=0.1))
        for t, p, n in zip((-0.5, 0.0, 0.5), (0.05, 0.5, 0.95), nus)
    )
    return Scenario(
        name=name, epsilon=0.01, T=20.0, n_followers=100_000,
        followers=FollowerConfig(kernel=bc, sigma=0.01, init=InitLaw("uniform", 0.0, 0.75)),
        leaders=leaders, snapshots=(0.0, 5.0, 10.0, 20.0),
    )


def _test3() -> Scenario:
    a = 50.0
    cred = {"varsigma": 0.001, "gamma": 0.75, "a": a}
    leaders = tuple(
        LeaderConfig(target=t, psi=p, nu=n, sigma=0.01, kernel=KernelSpec.unit(),
                     fl_kernel=KernelSpec.unit(), c_fl=0.1, sigma_fl=0.01,
                     init=InitLaw("normal", mean=t, std=0.05), credibility=dict(cred))
        for t, p, n in ((0.5, 0.1, 0.5), (-0.5, 0.75, 0.1))
    )
    knowledge = KnowledgeParams(lam=0.01, lam_c=0.005, lam_b=0.005, sigma_kappa=2.5e-3,
                                z_max=10.0, init_low=0.0, init_high=1.0)
    return Scenario(
        name="test3", mode="heterogeneous", epsilon=0.01, T=10.0, n_followers=100_000,
        followers=FollowerConfig(kernel=KernelSpec.knowledge_gap(a), sigma=0.01,
                                 init=InitLaw("uniform", -1.0, 1.0)),
        leaders=leaders, knowledge=knowledge, snapshots=(0.0, 1.0, 5.0, 10.0),
    )


_PRESETS = {
    "test1": _test1,
    "test2a": lambda: _test2((0.5, 0.5, 0.5), "test2a"),
    "test2b": lambda: _test2((0.05, 0.15, 0.15), "test2b"),
    "test3": _test3,
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> Scenario:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"preset: unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return factory().validate()

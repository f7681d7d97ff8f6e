"""Scenario builders shared by the test modules."""
from dataclasses import replace

import numpy as np

from boltzgame.kernels import KernelSpec
from boltzgame.scenario import FollowerConfig, InitLaw, LeaderConfig, Scenario, preset


def unit_kernels(sc: Scenario) -> Scenario:
    """Replace every opinion kernel by the unit kernel."""
    leaders = tuple(replace(ld, kernel=KernelSpec.unit(), fl_kernel=KernelSpec.unit()) for ld in sc.leaders)
    return sc.with_(leaders=leaders, followers=replace(sc.followers, kernel=KernelSpec.unit()))


def unit_test2(nu=0.5) -> Scenario:
    """Three-group strategy set of test2 with unit kernels and a common penalty."""
    sc = unit_kernels(preset("test2a"))
    return sc.with_(leaders=tuple(replace(ld, nu=nu) for ld in sc.leaders), snapshots=())


def fokker_planck(eps: float, T: float = 10.0, n: int = 100_000, s2: float = 0.2) -> Scenario:
    """Two groups satisfying the closed-form steady-state assumptions (nu = 2M, c_FL = 1/M)."""
    s = float(np.sqrt(s2))
    leaders = tuple(
        LeaderConfig(target=t, psi=p, nu=4.0, sigma=0.1, c_fl=0.5, sigma_fl=s,
                     init=InitLaw("normal", mean=t, std=0.05))
        for t, p in ((0.5, 0.3), (-0.5, 0.6))
    )
    return Scenario(name="fokker_planck", epsilon=eps, T=T, n_followers=n,
                    followers=FollowerConfig(sigma=s, init=InitLaw("uniform", -1.0, 1.0)),
                    leaders=leaders).validate()


def small(name: str, n: int = 4000, T: float = 0.2) -> Scenario:
    sc = preset(name)
    return sc.with_(n_followers=n, T=T, snapshots=tuple(t for t in sc.snapshots if t <= T) + (T,)).validate()

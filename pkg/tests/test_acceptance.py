"""Acceptance criteria, run at full size and at the stated tolerances.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""
import filecmp
import time

import numpy as np
import pytest

from boltzgame import io
from boltzgame.best_reply import (StrategyParams, build_system, equal_penalty_control, is_well_posed,
                                  solve_controls, strategy_drift, total_control)
from boltzgame.errors import ConfigError, IllPosedError
from boltzgame.hetero import knowledge_quartile_stats
from boltzgame.kernels import admissible_noise_bounds
from boltzgame.moments import MeanSystemParams, asymptotic_consensus, integrate_means, settling_time
from boltzgame.scenario import PRESET_NAMES, preset
from boltzgame.simulation import histogram, init, run
from boltzgame.stationary import StationaryDensity, fd_residual, l1_distance, stationary_params

from helpers import fokker_planck, unit_test2

pytestmark = pytest.mark.slow

RESULTS = {}
SEEDS = range(5)


def record(n, ok, detail):
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] acceptance {n:2d}: {detail}"
    print(RESULTS[n])
    assert ok, detail


_RUNS = {}


def preset_run(name, seed=0, **changes):
    key = (name, seed, tuple(sorted(changes.items())))
    if key not in _RUNS:
        _RUNS[key] = run(preset(name).with_(**changes), seed=seed)
    return _RUNS[key]


def oracle(sc, row0, T, dt):
    return integrate_means(row0[1], row0[2:2 + sc.M], MeanSystemParams.from_scenario(sc), T, dt)


def test_01_best_reply_correctness():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst_res = worst_eq = worst_naive = 0.0
    for _ in range(10_000):
        M = int(rng.integers(1, 7))
        alpha = rng.uniform(1e-3, 0.5)
        floor = 4 * max(M - 2, 0) * alpha ** 2
        common = rng.random() < 0.5
        nus = np.full(M, floor + rng.uniform(1e-3, 2.0)) if common else floor + rng.uniform(1e-3, 2.0, M)
        strat = [StrategyParams(rng.uniform(), nu, rng.uniform(-1, 1)) for nu in nus]
        mF, mL = rng.uniform(-1, 1), rng.uniform(-1, 1, M)
        system = build_system(strat, alpha)
        F = strategy_drift(strat, mF, mL)
        u = solve_controls(system, F)
        rhs = system.betas * F / (2 * alpha)
        worst_res = max(worst_res, np.linalg.norm(system.matrix @ u - rhs) / max(np.linalg.norm(rhs), 1e-300))
        if common:
            closed = equal_penalty_control(system.betas[0], alpha, M, F)
            tot = total_control(system, mF, mL, strat)
            # relative to the magnitude of the summed terms: sum(F) may cancel to ~0
            scale = system.betas[0] / (2 * alpha * (1 + (M - 1) * system.betas[0])) * np.sum(np.abs(F))
            worst_eq = max(worst_eq, abs(tot - closed) / max(scale, 1e-300))
            worst_naive = max(worst_naive, abs(tot - closed) / max(abs(closed), 1e-300))
    elapsed = time.perf_counter() - t0
    ok = worst_res <= 1e-12 and worst_eq <= 1e-12 and elapsed < 5.0
    record(1, ok, (f"max residual {worst_res:.2e}, max closed-form gap {worst_eq:.2e} "
                      f"(vs |closed form|: {worst_naive:.2e}), {elapsed:.2f} s"))


def test_02_well_posedness_gate():
    failures = []
    for M in (3, 4, 6):
        for alpha in (0.01, 0.1, 0.3):
            thr = 4 * (M - 2) * alpha ** 2
            sweep = np.linspace(0.5 * thr, 1.5 * thr, 101)
            outcomes = []
            for nu in sweep:
                strat = [StrategyParams(0.5, nu, 0.1)] * M
                system = build_system(strat, alpha)
                try:
                    total_control(system, 0.0, np.zeros(M), strat)
                    outcomes.append(True)
                except IllPosedError:
                    outcomes.append(False)
                if outcomes[-1] != (nu > thr) or outcomes[-1] != is_well_posed([nu] * M, alpha):
                    failures.append((M, alpha, nu))
            first = outcomes.index(True)
            if first == 0 or not all(outcomes[first:]) or any(outcomes[:first]):
                failures.append((M, alpha, "no single flip"))
    record(2, not failures, f"{len(failures)} violations over 9 threshold sweeps")


def test_03_consensus_value():
    details, ok = [], True
    sc = preset("test1")
    rec = preset_run("test1")
    vbar = asymptotic_consensus(sc.strategies)
    t, mF, _ = oracle(sc, rec.moments[0], sc.T, sc.epsilon)
    t_star = settling_time(t, mF, vbar, 0.01)
    after = rec.t >= t_star - 1e-12
    worst = float(np.max(np.abs(rec.m_F[after] - vbar)))
    at = float(abs(rec.m_F[np.argmin(np.abs(rec.t - t_star))] - vbar))
    ok &= at <= 0.05 and worst <= 0.05
    details.append(f"test1 vbar={vbar:g} T*={t_star:g} |m_F(T*)|={at:.4f} sup(t>=T*)={worst:.4f}")

    sc2 = unit_test2()
    f, leaders = init(sc2, 0)
    row0 = [0.0, f.opinions.mean(), *[g.m_L0 for g in leaders]]
    t, mF, _ = oracle(sc2, row0, 200.0, sc2.epsilon)
    vbar2 = asymptotic_consensus(sc2.strategies)
    t_star2 = settling_time(t, mF, vbar2, 0.01)
    rec2 = run(sc2.with_(T=float(np.ceil(t_star2 / sc2.epsilon) * sc2.epsilon)), seed=0)
    gap2 = float(abs(rec2.m_F[-1] - vbar2))
    ok &= abs(vbar2 - 0.3) < 1e-12 and gap2 <= 0.05
    details.append(f"test2-style vbar={vbar2:g} T*={t_star2:g} |m_F(T*)-vbar|={gap2:.4f}")
    record(3, ok, "; ".join(details))


def test_04_oracle_tracking():
    sc = unit_test2()
    gaps = []
    for seed in SEEDS:
        rec = run(sc, seed=seed)
        _, mF, _ = oracle(sc, rec.moments[0], sc.T, sc.epsilon / 10)
        gaps.append(float(np.max(np.abs(rec.m_F - mF[::10]))))
    mean_gap = float(np.mean(gaps))
    record(4, mean_gap <= 0.03, f"sup gap averaged over 5 seeds {mean_gap:.5f} (max {max(gaps):.5f})")


def _acceptance_densities():
    out = []
    for eps in (0.1, 0.05, 0.01):
        sc = fokker_planck(eps)
        f, leaders = init(sc, 0)
        sp = stationary_params(sc, f.opinions.mean(), [g.m_L0 for g in leaders])
        out.append(("follower", eps, sp.follower()))
        out += [(f"leader{k + 1}", eps, sp.leader(k)) for k in range(sc.M)]
    return out


def test_05_stationary_residual():
    t0 = time.perf_counter()
    worst_res = worst_mass = worst_mean = 0.0
    for _, _, dens in _acceptance_densities():
        worst_res = max(worst_res, fd_residual(dens))
        worst_mass = max(worst_mass, abs(dens.integrate() - 1.0))
        worst_mean = max(worst_mean, abs(dens.mean() - dens.center))
    elapsed = time.perf_counter() - t0
    ok = worst_res <= 1e-6 and worst_mass <= 1e-8 and worst_mean <= 1e-6
    record(5, ok, f"residual {worst_res:.2e}, |mass-1| {worst_mass:.2e}, |mean-centre| {worst_mean:.2e}, {elapsed:.1f} s")


def test_06_monte_carlo_vs_fokker_planck():
    dists = []
    for eps in (0.1, 0.05, 0.01):
        sc = fokker_planck(eps)
        rec = run(sc, seed=0)
        sp = stationary_params(sc, rec.moments[0][1], rec.moments[0][2:2 + sc.M])
        h = histogram(rec.followers.opinions, 50, (-1.0, 1.0))
        dists.append(l1_distance(h.edges, h.density, StationaryDensity.build(sp.vbar, sp.sigma_F2)))
    monotone = all(b <= a + 0.02 for a, b in zip(dists, dists[1:]))
    ok = dists[-1] <= 0.1 and monotone
    record(6, ok, "L1 at eps=0.1, 0.05, 0.01: " + ", ".join(f"{d:.4f}" for d in dists))


def test_07_domain_closure():
    bad, rates = [], []
    for name in PRESET_NAMES:
        rec = preset_run(name)
        sc = rec.scenario
        if np.any(np.abs(rec.followers.opinions) > 1) or any(np.any(np.abs(g.opinions) > 1) for g in rec.leaders):
            bad.append(f"{name}: opinion outside [-1, 1]")
        if rec.followers.knowledge is not None and np.any(rec.followers.knowledge < 0):
            bad.append(f"{name}: negative knowledge")
        # follower rules: noise supports are validated inside the admissible interval
        for rule in ("follower_follower", "follower_leader"):
            if rec.rejection_rate(rule) != 0.0:
                bad.append(f"{name}: {rule} rejection rate {rec.rejection_rate(rule):.3g}")
        # the leader rule carries the control; with D(+-1) = 0 no noise interval is admissible
        # once the control is nonzero, so its rate is reported but not required to vanish
        try:
            admissible_noise_bounds(sc.leaders[0].diffusion, sc.epsilon, control_bound=1e-12, rule="leader")
            bad.append(f"{name}: leader rule unexpectedly admissible under control")
        except ConfigError:
            pass
        rates.append(f"{name} LL {rec.rejection_rate('leader_leader'):.2g}")
    record(7, not bad, "; ".join(bad) if bad else "no domain exits, follower rejection 0; " + ", ".join(rates))


def test_08_game_vs_control_only():
    kept, crossed = 0, 0
    for seed in SEEDS:
        g = preset_run("test1", seed=seed)
        d = g.m_L[:, 0] - g.m_L[:, 1]
        kept += bool(np.all(np.sign(d) == np.sign(d[0])))
        c = preset_run("test1", seed=seed, control="control_only")
        d = c.m_L[:, 0] - c.m_L[:, 1]
        crossed += bool(np.any(np.sign(d) != np.sign(d[0])))
    record(8, kept == 5 and crossed == 5, f"game keeps ordering {kept}/5, control_only crosses {crossed}/5")


def test_09_heterogeneous_bias():
    sc = preset("test3")
    target_radical, target_populist = sc.leaders[1].target, sc.leaders[0].target
    hits, means = 0, []
    for seed in SEEDS:
        rec = preset_run("test3", seed=seed)
        q = knowledge_quartile_stats(rec.followers.opinions, rec.followers.knowledge)
        top, bottom = q["opinion_mean"][-1], q["opinion_mean"][0]
        top_ok = abs(top - target_radical) < abs(top - target_populist)
        bottom_ok = abs(bottom - target_populist) < abs(bottom - target_radical)
        hits += bool(top_ok and bottom_ok)
        means.append(float(np.mean(rec.followers.knowledge)))
    fp = sc.knowledge.mean_fixed_point
    know_ok = all(abs(m - fp) <= 0.05 * fp for m in means)
    record(9, hits == 5 and know_ok,
           f"bias on {hits}/5 seeds; mean knowledge {np.mean(means):.3f} vs fixed point {fp:g}")


def test_10_determinism(tmp_path):
    mismatched = []
    for name in PRESET_NAMES:
        sc = preset(name)
        T = 0.5
        sc = sc.with_(T=T, snapshots=(0.0, T))
        a = io.write_run(run(sc), tmp_path / name / "a")
        b = io.write_run(run(sc), tmp_path / name / "b")
        if [p.name for p in a] != [p.name for p in b]:
            mismatched.append(name)
        mismatched += [f"{name}/{pa.name}" for pa, pb in zip(a, b) if not filecmp.cmp(pa, pb, shallow=False)]
    record(10, not mismatched, "byte-identical outputs for all presets" if not mismatched else ", ".join(mismatched))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

from dataclasses import replace

import numpy as np
import pytest

from boltzgame.errors import IllPosedError
from boltzgame.moments import MeanSystemParams, integrate_means
from boltzgame.scenario import preset
from boltzgame.simulation import (ScalingConfig, Simulator, density_grid, estimate_moments, histogram,
                                  init, run)

from helpers import small, unit_test2


def test_scaling():
    s = ScalingConfig(0.01)
    assert s.alpha == s.dt == 0.01
    assert s.noise(0.1).variance == pytest.approx(1e-4)
    assert s.nu(0.1) == pytest.approx(1e-3)


def test_init_shapes_and_anchor():
    sc = small("test3")
    f, leaders = init(sc, 3)
    assert f.opinions.shape == (4000,) and f.knowledge.shape == (4000,)
    assert [g.opinions.size for g in leaders] == sc.leader_counts()
    for g in leaders:
        assert g.credibility.anchor == g.m_L0 == pytest.approx(np.mean(g.opinions))
    assert sum(sc.leader_counts()) / (4000 + sum(sc.leader_counts())) == pytest.approx(0.1, abs=1e-3)


def test_moments_recording():
    sc = small("test2a", T=0.1)
    rec = run(sc, seed=1)
    assert rec.moments.shape == (sc.n_steps + 1, 3 + 2 * sc.M)
    np.testing.assert_allclose(rec.t, np.arange(sc.n_steps + 1) * sc.epsilon)
    last = estimate_moments(rec.followers, rec.leaders, rec.t[-1]).as_row()
    np.testing.assert_array_equal(rec.moments[-1], last)
    assert [s.t for s in rec.snapshots] == [0.0, 0.1]


@pytest.mark.parametrize("name", ["test1", "test2a", "test2b", "test3"])
def test_same_seed_same_trajectory(name):
    sc = small(name, n=3000, T=0.1)
    a, b = run(sc, seed=7), run(sc, seed=7)
    np.testing.assert_array_equal(a.moments, b.moments)
    assert not np.array_equal(a.moments, run(sc, seed=8).moments)


def test_threads_do_not_change_results():
    sc = small("test3", n=70_000, T=0.05)
    a = run(sc, seed=2, threads=1)
    b = run(sc, seed=2, threads=3)
    np.testing.assert_array_equal(a.followers.opinions, b.followers.opinions)
    np.testing.assert_array_equal(a.followers.knowledge, b.followers.knowledge)


@pytest.mark.parametrize("name", ["test1", "test2b", "test3"])
def test_domain_closure(name):
    rec = run(small(name, n=5000, T=0.5), seed=0)
    assert np.all(np.abs(rec.followers.opinions) <= 1.0)
    for g in rec.leaders:
        assert np.all(np.abs(g.opinions) <= 1.0)
    if rec.followers.knowledge is not None:
        assert np.all(rec.followers.knowledge >= 0.0)
    assert rec.rejection_rate("follower_follower") == 0.0
    assert rec.rejection_rate("follower_leader") == 0.0


def test_follower_leader_frequency():
    sc = small("test1", n=20_000, T=0.5)
    rec = run(sc, seed=0)
    expected = sc.n_steps * sc.n_followers * sum(ld.c_fl for ld in sc.leaders)
    assert rec.attempts["follower_leader"] == pytest.approx(expected, rel=0.01)


def test_short_run_tracks_oracle():
    sc = unit_test2().with_(n_followers=20_000, T=2.0)
    rec = run(sc, seed=4)
    p = MeanSystemParams.from_scenario(sc)
    r0 = rec.moments[0]
    _, mF, mL = integrate_means(r0[1], r0[2:5], p, sc.T, sc.epsilon / 10)
    assert np.max(np.abs(rec.m_F - mF[::10])) < 3 / np.sqrt(sc.n_followers)
    assert np.max(np.abs(rec.m_L - mL[::10])) < 0.02


def test_game_drift_is_common_to_groups():
    rec = run(small("test1", n=5000, T=1.0), seed=0)
    gap = rec.m_L[:, 0] - rec.m_L[:, 1]
    assert np.ptp(gap) < 0.01


def test_control_variants_run():
    base = small("test2a", n=2000, T=0.1)
    for kind in ("control_only", "local_average", "limit"):
        rec = run(base.with_(control=kind), seed=0)
        assert np.all(np.isfinite(rec.moments))


def test_local_average_matches_game_on_means():
    # the pair correction averages out over each group
    base = small("test1", n=2000, T=0.3)
    g = run(base, seed=5)
    la = run(base.with_(control="local_average"), seed=5)
    np.testing.assert_allclose(g.m_L, la.m_L, atol=2e-3)


def test_ill_posed_scenario_is_refused():
    sc = preset("test2a")
    bad = sc.with_(epsilon=0.5, leaders=tuple(replace(ld, nu=1e-3, sigma=0.0, sigma_fl=0.0) for ld in sc.leaders))
    with pytest.raises(IllPosedError, match="leaders.nu"):
        Simulator(bad)


def test_histograms():
    v = np.array([-1.0, -0.99, 0.0, 0.5, 1.0, 2.0])
    h = histogram(v, 4)
    assert h.mass() == pytest.approx(1.0)
    assert h.density[-1] * 0.5 == pytest.approx(3 / 6)
    g = density_grid(np.zeros(10), np.linspace(0, 20, 10), bins=5, x_max=10.0)
    assert g.mass() == pytest.approx(1.0)

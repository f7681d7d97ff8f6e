import numpy as np
import pytest
from scipy.integrate import solve_ivp

from boltzgame.best_reply import StrategyParams
from boltzgame.moments import (MeanSystemParams, asymptotic_consensus, integrate_means, mean_rhs,
                               settling_time)
from boltzgame.scenario import preset


def test_consensus_values():
    assert asymptotic_consensus(preset("test1").strategies) == 0.0
    # psi-weighted targets of the three-group set: (0.05*-0.5 + 0.95*0.5) / 1.5
    assert asymptotic_consensus(preset("test2a").strategies) == pytest.approx(0.3, abs=1e-15)
    with pytest.raises(ValueError):
        asymptotic_consensus([StrategyParams(0.0, 1.0, 0.5)])


def make_params():
    strat = (StrategyParams(0.05, 0.5, -0.5), StrategyParams(0.5, 0.5, 0.0), StrategyParams(0.95, 0.5, 0.5))
    rho = np.full(3, 1 / 27)
    eps = 0.01
    beta = 4 * eps ** 2 / (eps * 0.5 + 4 * eps ** 2)
    return MeanSystemParams(np.full(3, 0.1) / (eps * rho), 1 / (eps * rho), rho, beta, eps, strat)


def test_rk4_against_scipy():
    p = make_params()

    def f(t, y):
        a, b = mean_rhs(y[0], y[1:], p)
        return np.concatenate([[a], b])

    t, mF, mL = integrate_means(0.4, [-0.5, 0.0, 0.5], p, 20.0, 0.01)
    ref = solve_ivp(f, (0, 20), [0.4, -0.5, 0.0, 0.5], t_eval=t[::100], rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(mF[::100], ref.y[0], atol=1e-9)
    np.testing.assert_allclose(mL[::100], ref.y[1:].T, atol=1e-9)


def test_convergence_to_consensus():
    p = make_params()
    t, mF, mL = integrate_means(0.4, [-0.5, 0.0, 0.5], p, 200.0, 0.05)
    assert mF[-1] == pytest.approx(0.3, abs=1e-8)
    # group differences are conserved by the common control
    np.testing.assert_allclose(np.diff(mL[-1]), [0.5, 0.5], atol=1e-12)


def test_from_scenario_needs_common_penalty():
    from boltzgame.errors import ConfigError
    with pytest.raises(ConfigError, match="nu"):
        MeanSystemParams.from_scenario(preset("test2b"))
    p = MeanSystemParams.from_scenario(preset("test1"))
    assert p.alpha == 0.01
    # with c_FL/(eps rho) and alpha = eps the follower rate is sum of c_FL
    assert np.sum(p.c_fl * p.rho * p.alpha) == pytest.approx(0.2, rel=1e-12)


def test_settling_time():
    t = np.linspace(0, 10, 11)
    m = np.exp(-t)
    assert settling_time(t, m, 0.0, 0.01) == 5.0
    assert settling_time(t, np.ones(11), 0.0, 0.01) == np.inf

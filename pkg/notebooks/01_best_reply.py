# %% [markdown]
# # Best-reply controls of competing leader groups
#
# Every time step each leader group picks the control that minimises its own
# one-step cost given the controls of the others.  The result is a small
# linear system with unit diagonal; leaders are moved by the sum of all
# controls.

# %%
import numpy as np

from boltzgame.best_reply import (StrategyParams, build_system, equal_penalty_control, is_well_posed,
                                  solve_controls, strategy_drift, total_control)

strategies = [StrategyParams(psi=0.05, nu=0.5, target=-0.5),
              StrategyParams(psi=0.5, nu=0.5, target=0.0),
              StrategyParams(psi=0.95, nu=0.5, target=0.5)]
alpha = 0.1
system = build_system(strategies, alpha)
print("matrix\n", system.matrix)
print("inverse column sums", system.col_sums)

# %% [markdown]
# With the followers at `m_F = 0.2` and the groups at their targets the
# drifts `F` and controls are:

# %%
m_F, m_L = 0.2, [-0.5, 0.0, 0.5]
F = strategy_drift(strategies, m_F, m_L)
u = solve_controls(system, F)
print("F =", F)
print("u =", u, " sum =", u.sum())
print("closed form for a shared penalty:", equal_penalty_control(system.betas[0], alpha, 3, F))
print("through the column sums:        ", total_control(system, m_F, m_L, strategies))

# %% [markdown]
# The system is guaranteed solvable when every penalty exceeds
# `4 (M - 2) alpha^2`.  Sweeping the penalty across that value:

# %%
thr = 4 * (3 - 2) * alpha ** 2
for nu in np.linspace(0.8 * thr, 1.2 * thr, 5):
    print(f"nu = {nu:.4f}  well posed: {is_well_posed([nu] * 3, alpha)}")

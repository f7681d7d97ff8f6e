# %% [markdown]
# # Monte Carlo means against the mean-opinion ODE
#
# With unit kernels and a shared penalty the first moments obey a closed
# linear ODE system.  The particle simulation should track it up to sampling
# noise of order `1 / sqrt(N)`.

# %%
from dataclasses import replace

import numpy as np

from boltzgame.kernels import KernelSpec
from boltzgame.moments import MeanSystemParams, asymptotic_consensus, integrate_means
from boltzgame.scenario import preset
from boltzgame.simulation import run

sc = preset("test2a")
sc = sc.with_(
    leaders=tuple(replace(ld, kernel=KernelSpec.unit(), fl_kernel=KernelSpec.unit()) for ld in sc.leaders),
    followers=replace(sc.followers, kernel=KernelSpec.unit()),
    n_followers=20_000, T=10.0, snapshots=(),
)
rec = run(sc, seed=0)
params = MeanSystemParams.from_scenario(sc)
t, m_F, m_L = integrate_means(rec.m_F[0], rec.m_L[0], params, sc.T, sc.epsilon)

for i in range(0, len(t), 200):
    print(f"t = {t[i]:5.1f}   MC {rec.m_F[i]:+.4f}   ODE {m_F[i]:+.4f}")
print("sup gap", np.max(np.abs(rec.m_F - m_F)).round(5), " consensus", asymptotic_consensus(sc.strategies))

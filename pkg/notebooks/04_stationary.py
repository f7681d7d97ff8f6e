# %% [markdown]
# # Steady states of the Fokker-Planck limit
#
# With `D(w) = 1 - w^2` the steady follower profile has a closed form with
# centre `vbar` and variance parameter `sigma_F^2`.  Below it is checked
# against its own differential equation and against a long particle run.

# %%
import numpy as np

from boltzgame.scenario import FollowerConfig, InitLaw, LeaderConfig, Scenario
from boltzgame.simulation import histogram, run
from boltzgame.stationary import StationaryDensity, fd_residual, l1_distance, stationary_params

s = np.sqrt(0.2)
leaders = tuple(LeaderConfig(target=t, psi=p, nu=4.0, sigma=0.1, c_fl=0.5, sigma_fl=s,
                             init=InitLaw("normal", mean=t, std=0.05))
                for t, p in ((0.5, 0.3), (-0.5, 0.6)))
sc = Scenario(name="steady", epsilon=0.02, T=10.0, n_followers=50_000,
              followers=FollowerConfig(sigma=s, init=InitLaw("uniform", -1.0, 1.0)),
              leaders=leaders).validate()

rec = run(sc, seed=0)
sp = stationary_params(sc, rec.m_F[0], rec.m_L[0])
f = StationaryDensity.build(sp.vbar, sp.sigma_F2)
print(f"vbar = {sp.vbar:.4f}, sigma_F^2 = {sp.sigma_F2:.3f}")
print(f"ODE residual {fd_residual(f):.1e}, mass {f.integrate():.12f}, mean {f.mean():+.6f}")

# %%
h = histogram(rec.followers.opinions, 50)
print("L1 distance to the particle histogram:", round(l1_distance(h.edges, h.density, f), 4))
for c, d in list(zip(h.centers, h.density))[::5]:
    print(f"w = {c:+.2f}  histogram {d:.3f}  analytic {f(c):.3f}")

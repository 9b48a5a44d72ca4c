# %% [markdown]
# # Transmission through twenty emitters: ordered, random, independent
#
# Same scenario machinery the CLI uses, run in memory.

# %%
import matplotlib.pyplot as plt
import numpy as np

from quasi1d import load_config, run_scenario

cfg = load_config({"preset": "fig3"})
result = run_scenario(cfg, write=False)
sorted(result.tables)

# %%
fig, ax = plt.subplots()
for name, table in result.tables.items():
    if name.startswith("spectrum_random"):
        ax.plot(table.detuning, table.transmittance, color="tab:orange", lw=0.6)
reg = result.tables["spectrum_regular.csv"]
ax.plot(reg.detuning, reg.transmittance, "b--", label="regular, d = lambda/2")
bl = result.tables["beer_lambert.csv"]
ax.plot(bl.detuning, bl.exact, "k", lw=2, label="independent emitters")
ax.set_yscale("log")
ax.set_xlabel("detuning / Gamma'")
ax.set_ylabel("T / T0")
ax.legend()

# %% [markdown]
# For independent emitters the resonant transmittance is
# `((Gamma' + Gamma_1D) / Gamma')^(-2N)`, close to `exp(-OD)` for a weak
# per-emitter coupling.

# %%
from quasi1d import beer_lambert

weak = beer_lambert(np.array([0.0]), 20, 0.05, 1.0)
print(weak.exact[0], np.exp(-weak.optical_depth))

plt.show()

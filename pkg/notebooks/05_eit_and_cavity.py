# %% [markdown]
# # Control fields and colored reservoirs
#
# ## EIT window
#
# A control field opens a transparency window at two-photon resonance. Near
# the centre the polariton wavevector has a power series whose linear term
# sets the group velocity.

# %%
import matplotlib.pyplot as plt
import numpy as np

from quasi1d import load_config, run_scenario
from quasi1d.eit import group_velocity, keff_coefficients

res = run_scenario(load_config({"preset": "figEIT"}), write=False)
eit = res.tables["eit.csv"]
fig, (a, b) = plt.subplots(2, 1, sharex=True)
a.plot(eit.detuning, np.abs(eit.t) ** 2)
a.set_ylabel("T")
b.plot(eit.detuning, eit.k_eff.real * eit.spacing, label="Re k d")
b.plot(eit.detuning, eit.k_eff.imag * eit.spacing, label="Im k d")
b.set_xlabel("detuning / Gamma'")
b.legend()

# %%
from quasi1d import EmitterChain, WaveguideModel, build_coupling_matrix

g = build_coupling_matrix(EmitterChain.regular(5, 0.25), WaveguideModel(0.5))
c1, c2, c3 = keff_coefficients(g, 1.0, 1.0, 0.25)
print("1 / Re c1 =", 1 / c1.real, "  2 Omega^2 d / Gamma_1D =", group_velocity(1.0, 0.25, 0.5))

# %% [markdown]
# ## Narrow cavity
#
# When the cavity linewidth is comparable to the emitter linewidth the
# coupling varies across the spectrum. Rebuilding the eigenvalues at every
# frequency gives a vacuum-Rabi split response; freezing them gives the
# Markovian curve.

# %%
res = run_scenario(load_config({"preset": "fig5"}), write=False)
fig, axes = plt.subplots(2, 1, sharex=True)
for name, (nm, mk) in sorted(res.tables.items()):
    meta = res.metadata["files"][name]
    ax = axes[int(meta["cavity_detuning_ratio"])]
    style = "--" if meta["kappa"] < 1 else "-"
    ax.plot(nm.detuning, nm.transmittance, style, label=f"kappa = {meta['kappa']:g}")
axes[0].set_xlim(-5, 5)
axes[0].set_yscale("log")
axes[1].set_yscale("log")
axes[1].set_xlabel("detuning / Gamma'")
axes[0].legend()

plt.show()

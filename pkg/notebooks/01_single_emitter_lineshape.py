# %% [markdown]
# # One emitter next to a structured reservoir
#
# A single emitter sees its own field through the self coupling
# `J + i Gamma_1D / 2`. With `J = 0` the transmission dip is a Lorentzian;
# a finite exchange term makes it asymmetric and pushes the features to
# positive detuning.

# %%
import matplotlib.pyplot as plt
import numpy as np

from quasi1d import fano, transmission_product

detuning = np.linspace(-15, 15, 1201)
gamma_1d = gamma_prime = 1.0

# %%
fig, ax = plt.subplots()
for ratio in (0.0, 1.0, 2.0, 5.0):
    p = fano(ratio * gamma_1d, gamma_1d, gamma_prime)
    ax.plot(detuning, p.transmittance(detuning), label=f"J/Gamma_1D = {ratio:g}, q = {p.q:.2f}")
ax.set_xlabel("detuning / Gamma'")
ax.set_ylabel("T / T0")
ax.legend()

# %% [markdown]
# The Fano form and the product over eigenvalues are the same function:

# %%
p = fano(2.0, gamma_1d, gamma_prime)
direct = transmission_product(detuning, [complex(2.0, 0.5)], gamma_prime).transmittance
print("max |difference|:", np.max(np.abs(p.transmittance(detuning) - direct)))

# %% [markdown]
# Where does the minimum sit? It moves to the blue side as soon as `J > 0`,
# but it does not keep moving: for large `J` the dip narrows back towards
# the bare resonance while the peak runs away.

# %%
fine = np.linspace(-3, 3, 600001)
for ratio in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0):
    T = fano(ratio, gamma_1d, gamma_prime).transmittance(fine)
    print(f"J/Gamma_1D = {ratio:4.1f}   minimum at {fine[np.argmin(T)]:+.4f}")

plt.show()

# %% [markdown]
# # Collective modes of a short waveguide chain
#
# Five emitters on a bare waveguide, spacing swept over one wavelength.
# Eigenvalues of the coupling matrix give shifts (real part) and half the
# guided decay rates (imaginary part).

# %%
import matplotlib.pyplot as plt
import numpy as np

from quasi1d import EmitterChain, WaveguideModel, build_coupling_matrix, decompose

model = WaveguideModel(gamma_1d=1.0)
spacings = np.linspace(0.005, 1.0, 200)

shifts, rates = [], []
for d in spacings:
    modes = decompose(build_coupling_matrix(EmitterChain.regular(5, d), model))
    shifts.append(modes.shifts)
    rates.append(modes.rates)
shifts, rates = np.array(shifts), np.array(rates)

# %%
fig, (a, b) = plt.subplots(2, 1, sharex=True)
a.plot(spacings, shifts, ".", ms=2)
a.set_ylabel("J_xi / Gamma_1D")
b.plot(spacings, rates, ".", ms=2)
b.set_ylabel("Gamma_xi / Gamma_1D")
b.set_xlabel("d / lambda_p")

# %% [markdown]
# At half-wavelength spacing the chain is a single bright mode carrying all
# the guided decay, with four dark partners.

# %%
m = decompose(build_coupling_matrix(EmitterChain.regular(5, 0.5), model))
print(np.round(m.eigenvalues, 12))

plt.show()

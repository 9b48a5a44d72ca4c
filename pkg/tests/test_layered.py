import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasi1d.errors import ModelValidityError
from quasi1d.greens import WaveguideModel, cavity_green_two_mirror
from quasi1d.layered import (HelmholtzSolution, LayeredReservoir, LayeredStack, Slab,
                             cavity_stack, helmholtz_green)


def vacuum_like(omega=2.0):
    # a slab with the outer permittivity is invisible
    return LayeredStack((Slab(1.3, 1.0),)), omega


def test_uniform_medium_matches_free_propagator():
    stack, omega = vacuum_like()
    x = np.linspace(-2, 3, 41)
    xx, pp = np.meshgrid(x, x)
    g = helmholtz_green(xx, pp, omega, stack)
    ref = 1j * np.exp(1j * omega * np.abs(xx - pp)) / (2 * omega)
    assert np.max(np.abs(g - ref)) < 1e-10


def test_wronskian_is_position_independent():
    stack = LayeredStack((Slab(0.2, 4.0), Slab(0.5, 2.25 + 0.1j), Slab(0.3, 9.0)))
    sol = HelmholtzSolution(stack, 3.0)
    w = sol.wronskian(np.linspace(-1, 2, 57))
    assert np.max(np.abs(w - w[0])) / abs(w[0]) < 1e-10


def test_thin_mirror_cavity_matches_two_mirror_closed_form():
    w, length, omega = 0.02, 1.0, 2 * np.pi * 3.1
    stack = cavity_stack(length, w, 30.0)
    sol = HelmholtzSolution(stack, omega)
    _, r_from_left, r_from_right = HelmholtzSolution(LayeredStack((Slab(w, 30.0),)), omega).scattering()
    x = np.linspace(w, w + length, 31)
    xx, pp = np.meshgrid(x, x)
    g = sol.green(xx, pp)
    ref = cavity_green_two_mirror(xx - w, pp - w, omega, length, r_from_right, r_from_left)
    assert np.max(np.abs(g - ref) / np.abs(ref)) < 1e-6


@given(st.floats(-1, 2), st.floats(-1, 2))
def test_reciprocity(x, xp):
    stack = LayeredStack((Slab(0.3, 6.0 + 0.5j), Slab(0.4, 2.0)))
    sol = HelmholtzSolution(stack, 4.0)
    a, b = sol.green(x, xp), sol.green(xp, x)
    assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)


def test_lossless_stack_conserves_flux_and_lossy_absorbs():
    lossless = HelmholtzSolution(LayeredStack((Slab(0.21, 12.0), Slab(0.4, 2.0))), 5.0)
    t, rl, rr = lossless.scattering()
    assert abs(t) ** 2 + abs(rl) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(t) ** 2 + abs(rr) ** 2 == pytest.approx(1.0, abs=1e-12)
    lossy = HelmholtzSolution(LayeredStack((Slab(0.21, 12.0 + 1.0j),)), 5.0)
    t, rl, _ = lossy.scattering()
    assert abs(t) ** 2 + abs(rl) ** 2 < 1.0


def test_deep_bragg_mirror_stays_finite():
    # 200 quarter-wave periods at the gap centre: the field decays by many
    # orders of magnitude across the stack
    n_hi, n_lo, omega = 3.5, 1.5, 2 * np.pi
    period = (Slab(0.25 / n_hi, n_hi**2), Slab(0.25 / n_lo, n_lo**2))
    stack = LayeredStack(period * 200)
    sol = HelmholtzSolution(stack, omega)
    t, r, _ = sol.scattering()
    assert abs(r) == pytest.approx(1.0, abs=1e-12)
    # each period scales the field by n_lo / n_hi at the gap centre
    assert np.log10(abs(t)) == pytest.approx(200 * np.log10(n_lo / n_hi), abs=1.0)
    inner = stack.boundaries[100] + 0.01
    g = sol.green(inner, inner + 0.05)
    assert np.isfinite(g)
    assert sol.green(inner + 0.05, inner) == pytest.approx(g, rel=1e-12)


def test_evanescent_slab_is_substepped():
    # metal-like slab: |Im k| h far above one step's growth budget
    stack = LayeredStack((Slab(5.0, -400.0 + 1.0j),))
    sol = HelmholtzSolution(stack, 2.0)
    w = sol.wronskian(np.array([-0.5, 1.0, 2.5, 4.0, 6.0]))
    assert np.max(np.abs(w - w[0]) / np.abs(w[0])) < 1e-10


def test_layered_reservoir_in_uniform_medium_is_a_waveguide():
    stack, omega = vacuum_like(2 * np.pi)
    res = LayeredReservoir(stack, omega, gamma_1d=0.8)
    wg = WaveguideModel(0.8)
    x = np.array([0.0, 0.3, 1.1])
    np.testing.assert_allclose(res.coupling(x[:, None], x[None, :]),
                               wg.coupling(x[:, None], x[None, :]), atol=1e-12)


def test_invalid_stacks():
    with pytest.raises(ModelValidityError):
        Slab(0.0, 2.0)
    with pytest.raises(ModelValidityError):
        Slab(1.0, 2.0 - 0.1j)
    with pytest.raises(ModelValidityError):
        HelmholtzSolution(LayeredStack((Slab(1.0, 2.0),)), -1.0)

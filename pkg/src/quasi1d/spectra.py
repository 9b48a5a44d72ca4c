"""Steady-state response: coherences, fields, transmission and reflection.

All detunings and rates share the reference rate of the coupling matrix.
The probe is launched from a point source left of the chain; drive
amplitudes and fields are expressed as Rabi frequencies,
``Omega(x) = d E^+(x) / hbar``.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .collective import CouplingMatrix, ModeDecomposition, decompose
from .errors import ModelValidityError, PoleError

__all__ = [
    "SpectrumTable",
    "FanoParameters",
    "BeerLambertSpectrum",
    "probe_drive",
    "steady_state_coherences",
    "field_profile",
    "scattering",
    "transmission",
    "reflection",
    "transmission_product",
    "fano",
    "beer_lambert",
    "nonmarkov_spectrum",
    "default_detuning_grid",
]

_POLE_RTOL = 1e-14
_POLE_COND = 1e14


@dataclass
class SpectrumTable:
    """Complex normalized transmission (and optionally reflection) on a grid."""

    detuning: np.ndarray
    t: np.ndarray
    r: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def transmittance(self):
        """``|t/t0|^2``."""
        return np.abs(self.t) ** 2

    @property
    def reflectance(self):
        return None if self.r is None else np.abs(self.r) ** 2

    columns = ("detuning", "re_t", "im_t", "T", "re_r", "im_r", "R")

    def rows(self):
        r = self.r if self.r is not None else np.full_like(self.t, np.nan)
        for d, t, rr in zip(self.detuning, self.t, r):
            yield (d, t.real, t.imag, abs(t) ** 2, rr.real, rr.imag, abs(rr) ** 2)


def default_detuning_grid(gamma_prime, rates, num=2001, span=10.0):
    """``num`` points over ``+-span * (gamma_prime + max rate) / 2``."""
    width = 0.5 * (gamma_prime + max(np.max(rates, initial=0.0), 0.0))
    if width <= 0:
        width = 1.0
    return np.linspace(-span * width, span * width, num)


def _matrix(g):
    return np.asarray(g.values if isinstance(g, CouplingMatrix) else g, dtype=complex)


def _response_matrices(g, gamma_prime, detuning):
    d = np.atleast_1d(np.asarray(detuning, dtype=float))
    n = g.shape[0]
    return (d + 0.5j * gamma_prime)[:, None, None] * np.eye(n) + g[None, :, :]


def _solve(m, rhs):
    """Batched solve of ``m x = rhs`` that reports singular points as poles."""
    cond = np.linalg.cond(m)
    bad = ~(cond < _POLE_COND)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise PoleError(f"response matrix is singular at grid point {i} (undamped pole)")
    return np.linalg.solve(m, rhs[..., None])


def probe_drive(model, positions, amplitude=1.0, omega=None):
    """Rabi frequencies at ``positions`` of a probe launched left of the chain.

    ``Omega_j = amplitude * g(x_j, x_left) / g(x_left, x_left)`` so that
    ``amplitude`` is the bare probe at ``x_left``.
    """
    x_left, _ = model.probe_points(positions)
    x = np.asarray(positions, dtype=float)
    return amplitude * model.coupling(x, x_left, omega) / model.coupling(x_left, x_left, omega)


def steady_state_coherences(g, gamma_prime, detuning, drive, method="direct"):
    """Linear steady state ``sigma = -M^{-1} Omega`` with ``M = (Delta + i Gamma'/2) 1 + g``.

    ``method="modes"`` evaluates the same quantity as a sum over the
    collective modes; it is kept as an independent check of the direct
    solve.
    """
    g = _matrix(g)
    drive = np.asarray(drive, dtype=complex)
    if method == "direct":
        m = _response_matrices(g, gamma_prime, detuning)
        sol = -_solve(m, np.broadcast_to(drive, (m.shape[0], drive.size)).copy())[..., 0]
        return sol[0] if np.ndim(detuning) == 0 else sol
    if method != "modes":
        raise ValueError(f"unknown method {method!r}")
    modes = decompose(g)
    d = np.atleast_1d(np.asarray(detuning, dtype=float))
    denom = d[:, None] + 0.5j * gamma_prime + modes.eigenvalues[None, :]
    if np.any(denom == 0):
        raise PoleError("detuning hits an undamped collective mode")
    weights = modes.overlaps(drive)[None, :] / denom
    sol = -weights @ modes.eigenvectors.T
    return sol[0] if np.ndim(detuning) == 0 else sol


def field_profile(x, sigma, model, positions, probe_field, omega=None):
    """Total guided field ``Omega(x) = Omega_p(x) + sum_j g(x, x_j) sigma_j``.

    ``probe_field`` is the bare probe at ``x`` (scalar or array matching
    ``x``).
    """
    x = np.asarray(x, dtype=float)
    positions = np.asarray(positions, dtype=float)
    g = model.coupling(x[..., None], positions, omega)
    return np.asarray(probe_field) + g @ np.asarray(sigma, dtype=complex)


def scattering(detuning, g, gamma_prime, model, positions, omega=None, r0=None, method="direct",
               precision="double"):
    """Normalized transmission ``t/t0`` and reflection ``r`` through the guided channel.

    ``t/t0 = 1 - g_R^T M^{-1} g_L / g(x_R, x_L)`` and
    ``r = r0 - g_L^T M^{-1} g_L / g(x_L, x_L)``, where ``g_L``/``g_R`` hold
    the couplings of every emitter to probe points just outside the chain.
    ``method="modes"`` uses the explicit eigenmode sum instead of a linear
    solve.

    In a deep dip ``t`` is the small difference of two numbers close to
    one, so the double-precision direct solve carries an absolute error of
    order ``eps`` and a relative error of order ``eps / |t|``.
    ``precision="extended"`` re-evaluates every coupling from ``model`` in
    long double and solves in long double, which pushes that floor down by
    the ratio of the two machine epsilons (platform dependent). ``g`` must
    then be the model's own coupling matrix for ``positions``.
    """
    if not getattr(model, "supports_propagation", False):
        raise ModelValidityError(
            f"{type(model).__name__} has no propagating guided channel"
        )
    g = _matrix(g)
    positions = np.asarray(positions, dtype=float)
    x_left, x_right = model.probe_points(positions)
    g_l = np.asarray(model.coupling(positions, x_left, omega), dtype=complex)
    g_r = np.asarray(model.coupling(positions, x_right, omega), dtype=complex)
    g_rl = complex(model.coupling(x_right, x_left, omega))
    g_ll = complex(model.coupling(x_left, x_left, omega))
    r0 = model.r0 if r0 is None else r0
    d = np.atleast_1d(np.asarray(detuning, dtype=float))

    if precision == "extended":
        if method != "direct":
            raise ValueError("extended precision is only available for the direct solve")
        t, r = _scattering_extended(d, g, gamma_prime, model, positions, omega, r0)
    elif precision != "double":
        raise ValueError(f"unknown precision {precision!r}")
    elif method == "direct":
        m = _response_matrices(g, gamma_prime, d)
        sol = _solve(m, np.broadcast_to(g_l, (d.size, g_l.size)).copy())[..., 0]
        t = 1.0 - (sol @ g_r) / g_rl
        r = r0 - (sol @ g_l) / g_ll
    elif method == "modes":
        modes = decompose(g)
        denom = d[:, None] + 0.5j * gamma_prime + modes.eigenvalues[None, :]
        if np.any(denom == 0):
            raise PoleError("detuning hits an undamped collective mode")
        left = modes.overlaps(g_l)
        right = modes.overlaps(g_r)
        t = 1.0 - np.sum(right * left / denom, axis=1) / g_rl
        r = r0 - np.sum(left * left / denom, axis=1) / g_ll
    else:
        raise ValueError(f"unknown method {method!r}")
    meta = {"model": type(model).__name__, "n": int(positions.size),
            "gamma_prime": float(gamma_prime), "x_left": x_left, "x_right": x_right,
            "precision": precision}
    return SpectrumTable(d, t, r, meta)


def _solve_extended(m, rhs):
    """Gaussian elimination with partial pivoting, batched over the first axis.

    Works in whatever dtype ``m`` has; LAPACK has no long-double routines.
    """
    m = m.copy()
    x = rhs.copy()
    k, n, _ = m.shape
    rows = np.arange(k)
    for col in range(n):
        piv = col + np.argmax(np.abs(m[:, col:, col]), axis=1)
        swap = piv != col
        if np.any(swap):
            r = rows[swap]
            p = piv[swap]
            m[r, col], m[r, p] = m[r, p].copy(), m[r, col].copy()
            x[r, col], x[r, p] = x[r, p].copy(), x[r, col].copy()
        pivot = m[:, col, col]
        factors = m[:, col + 1:, col] / pivot[:, None]
        m[:, col + 1:, col:] -= factors[:, :, None] * m[:, None, col, col:]
        x[:, col + 1:] -= factors * x[:, col, None]
    for col in range(n - 1, -1, -1):
        acc = x[:, col] - np.sum(m[:, col, col + 1:] * x[:, col + 1:], axis=1)
        x[:, col] = acc / m[:, col, col]
    return x


def _scattering_extended(d, g, gamma_prime, model, positions, omega, r0):
    x = positions.astype(np.longdouble)
    x_left, x_right = (np.longdouble(v) for v in model.probe_points(positions))
    g_ext = np.asarray(model.coupling(x[:, None], x[None, :], omega))
    if g_ext.dtype != np.clongdouble:
        raise ModelValidityError(f"{type(model).__name__} cannot be evaluated in extended precision")
    g_ext = np.triu(g_ext) + np.triu(g_ext, 1).T
    scale = max(np.max(np.abs(g)), np.finfo(float).tiny)
    if np.max(np.abs(g_ext.astype(complex) - g)) > 1e-12 * scale:
        raise ValueError("extended precision needs the model's own coupling matrix")
    g_l = np.asarray(model.coupling(x, x_left, omega))
    g_r = np.asarray(model.coupling(x, x_right, omega))
    g_rl = model.coupling(x_right, x_left, omega)
    g_ll = model.coupling(x_left, x_left, omega)
    m = _response_matrices(g, gamma_prime, d)
    _solve(m, np.zeros(m.shape[:2], dtype=complex))  # pole check in double
    half = np.longdouble(gamma_prime) / 2
    base = d.astype(np.longdouble) + 1j * half
    m_ext = base[:, None, None] * np.eye(x.size, dtype=np.clongdouble) + g_ext[None]
    sol = _solve_extended(m_ext, np.broadcast_to(g_l, (d.size, x.size)).copy())
    t = 1 - (sol @ g_r) / g_rl
    r = r0 - (sol @ g_l) / g_ll
    return t.astype(complex), r.astype(complex)


def transmission(detuning, g, gamma_prime, model, positions, omega=None, method="direct",
                 precision="double"):
    """Normalized transmission ``t/t0``; see :func:`scattering`."""
    table = scattering(detuning, g, gamma_prime, model, positions, omega, method=method,
                       precision=precision)
    table.r = None
    return table


def reflection(detuning, g, gamma_prime, model, positions, omega=None, r0=None, method="direct"):
    """Reflection ``r``; returned in the ``r`` field of the table."""
    return scattering(detuning, g, gamma_prime, model, positions, omega, r0, method)


def _eigenvalues(modes):
    if isinstance(modes, ModeDecomposition):
        return modes.eigenvalues
    return np.atleast_1d(np.asarray(modes, dtype=complex))


def transmission_product(detuning, modes, gamma_prime):
    """``t/t0 = prod_xi (Delta + i Gamma'/2) / (Delta + i Gamma'/2 + lambda_xi)``.

    ``modes`` is a :class:`ModeDecomposition` or a bare eigenvalue array.
    """
    lam = _eigenvalues(modes)
    d = np.atleast_1d(np.asarray(detuning, dtype=float))
    base = d + 0.5j * gamma_prime
    denom = base[:, None] + lam[None, :]
    scale = np.abs(base)[:, None] + np.abs(lam)[None, :]
    if np.any(np.abs(denom) <= _POLE_RTOL * np.maximum(scale, np.finfo(float).tiny)):
        raise PoleError("a collective-mode factor has a vanishing denominator on the grid")
    t = np.prod(base[:, None] / denom, axis=1)
    return SpectrumTable(d, t, None, {"n": int(lam.size), "gamma_prime": float(gamma_prime)})


@dataclass(frozen=True)
class FanoParameters:
    """Single-emitter lineshape as a Fano resonance plus a Lorentzian background."""

    j_1d: float
    gamma_1d: float
    gamma_prime: float

    def __post_init__(self):
        if not self.gamma_1d + self.gamma_prime > 0:
            raise ValueError("gamma_1d + gamma_prime must be positive")

    @property
    def q(self):
        """Asymmetry parameter ``-2 J / (Gamma_1D + Gamma')``."""
        return -2.0 * self.j_1d / (self.gamma_1d + self.gamma_prime)

    @property
    def background_weight(self):
        return (self.gamma_prime / (self.gamma_prime + self.gamma_1d)) ** 2

    def reduced_detuning(self, detuning):
        return 2.0 * (np.asarray(detuning) + self.j_1d) / (self.gamma_1d + self.gamma_prime)

    def transmittance(self, detuning):
        chi = self.reduced_detuning(detuning)
        return ((self.q + chi) ** 2 + self.background_weight) / (1.0 + chi**2)


def fano(j_1d, gamma_1d, gamma_prime):
    return FanoParameters(float(j_1d), float(gamma_1d), float(gamma_prime))


@dataclass(frozen=True)
class BeerLambertSpectrum:
    detuning: np.ndarray
    exact: np.ndarray
    approximate: np.ndarray
    optical_depth: float

    columns = ("detuning", "T_exact", "T_approx")

    def rows(self):
        yield from zip(self.detuning, self.exact, self.approximate)


def beer_lambert(detuning, n, gamma_1d, gamma_prime):
    """Independent-emitter transmittance and its optical-depth approximation."""
    if not gamma_prime > 0:
        raise ValueError("Beer-Lambert form needs gamma_prime > 0")
    d = np.asarray(detuning, dtype=float)
    ratio = (d**2 + 0.25 * (gamma_prime + gamma_1d) ** 2) / (d**2 + 0.25 * gamma_prime**2)
    exact = np.exp(-n * np.log(ratio))
    od = 2.0 * n * gamma_1d / gamma_prime
    approx = np.exp(-od / (1.0 + (2.0 * d / gamma_prime) ** 2))
    return BeerLambertSpectrum(d, exact, approx, od)


def nonmarkov_spectrum(detuning, model, gamma_prime, markov_detuning=0.0):
    """Transmission with frequency-resolved collective eigenvalues.

    At every grid point the coupling matrix is rebuilt from ``model`` (a
    :class:`~quasi1d.greens.TabulatedCoupling`) and its eigenvalues fed to
    the product formula. Returns ``(non_markov, markov)`` where the
    Markovian companion freezes the matrix at ``markov_detuning`` (the
    atomic resonance by default).
    """
    d = np.atleast_1d(np.asarray(detuning, dtype=float))
    model.check_range(d)
    base = d + 0.5j * gamma_prime
    t = np.empty(d.size, dtype=complex)
    for i, w in enumerate(d):
        lam = np.linalg.eigvals(model.matrix(w))
        t[i] = transmission_product(w, lam, gamma_prime).t[0]
    frozen = np.linalg.eigvals(model.matrix(markov_detuning))
    markov = transmission_product(d, frozen, gamma_prime)
    meta = {"n": int(model.n_atoms), "gamma_prime": float(gamma_prime),
            "model": model.description}
    markov.metadata.update(meta, markov=True)
    return SpectrumTable(d, t, None, dict(meta, markov=False)), markov

"""Lambda-system response of an emitter chain: EIT transmission and polariton dispersion.

A uniform control field of Rabi frequency ``Omega_c`` couples the excited
state to a metastable state with zero decay. The two-photon detuning is
locked to the probe detuning unless stated otherwise.
"""

from dataclasses import dataclass

import numpy as np

from .collective import CouplingMatrix, ModeDecomposition, decompose
from .errors import ModelValidityError, PoleError
from .spectra import SpectrumTable

__all__ = [
    "EITParameters",
    "EITSpectrum",
    "eit_transmission",
    "eit_coherences",
    "power_sums",
    "keff_coefficients",
    "keff_series",
    "keff_closed_form_coefficients",
    "keff_closed_forms",
    "keff_exact",
    "group_velocity",
]

_POLE_RTOL = 1e-14


@dataclass(frozen=True)
class EITParameters:
    """Control field and chain spacing.

    ``two_photon_detuning`` of ``None`` means it follows the probe detuning.
    """

    omega_c: float
    spacing: float = 1.0
    two_photon_detuning: float = None

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ModelValidityError("control Rabi frequency must be positive")
        if not self.spacing > 0:
            raise ModelValidityError("spacing must be positive")

    @property
    def locked(self):
        return self.two_photon_detuning is None


def _eigs(modes):
    if isinstance(modes, ModeDecomposition):
        return modes.eigenvalues
    if isinstance(modes, CouplingMatrix):
        return decompose(modes).eigenvalues
    return np.atleast_1d(np.asarray(modes, dtype=complex))


def _factor_parts(detuning, lam, gamma_prime, omega_c):
    d = np.atleast_1d(np.asarray(detuning, dtype=float))
    a = d * (d + 0.5j * gamma_prime) - omega_c**2
    b = d[:, None] * lam[None, :]
    return d, a, b


def eit_transmission(detuning, modes, gamma_prime, omega_c):
    """``t_EIT/t0 = prod_xi a / (a + Delta lambda_xi)`` with ``a = Delta (Delta + i Gamma'/2) - Omega_c^2``.

    ``modes`` may be a :class:`ModeDecomposition`, a coupling matrix, or a
    bare eigenvalue array.

    Raises
    ------
    PoleError
        If a factor's denominator vanishes on the grid.
    """
    if omega_c < 0:
        raise ModelValidityError("control Rabi frequency must be non-negative")
    lam = _eigs(modes)
    d, a, b = _factor_parts(detuning, lam, gamma_prime, omega_c)
    denom = a[:, None] + b
    scale = np.abs(a)[:, None] + np.abs(b)
    if np.any(np.abs(denom) <= _POLE_RTOL * np.maximum(scale, np.finfo(float).tiny)):
        raise PoleError("an EIT factor has a vanishing denominator on the grid")
    t = np.prod(a[:, None] / denom, axis=1)
    meta = {"n": int(lam.size), "gamma_prime": float(gamma_prime), "omega_c": float(omega_c)}
    return SpectrumTable(d, t, None, meta)


def eit_coherences(g, gamma_prime, detuning, drive, omega_c, two_photon_detuning=None):
    """Steady-state optical and spin coherences ``(sigma_ge, sigma_gs)``.

    With ``Delta_s`` the two-photon detuning (the probe detuning when
    ``None``), ``sigma_gs = -(Omega_c / Delta_s) sigma_ge`` and
    ``[Delta_s (Delta + i Gamma'/2 + g) - Omega_c^2] sigma_ge = -Delta_s Omega``.
    """
    g = np.asarray(g.values if isinstance(g, CouplingMatrix) else g, dtype=complex)
    ds = detuning if two_photon_detuning is None else two_photon_detuning
    if ds == 0:
        raise PoleError("zero two-photon detuning: the spin coherence is undefined")
    n = g.shape[0]
    m = ds * ((detuning + 0.5j * gamma_prime) * np.eye(n) + g) - omega_c**2 * np.eye(n)
    if not np.linalg.cond(m) < 1e14:
        raise PoleError("EIT response matrix is singular")
    sigma_ge = np.linalg.solve(m, -ds * np.asarray(drive, dtype=complex))
    return sigma_ge, -(omega_c / ds) * sigma_ge


def power_sums(g, orders=3):
    """``(Tr g, Tr g^2, ..., Tr g^orders)``, i.e. eigenvalue power sums."""
    g = np.asarray(g.values if isinstance(g, CouplingMatrix) else g, dtype=complex)
    out, p = [], np.eye(g.shape[0], dtype=complex)
    for _ in range(orders):
        p = p @ g
        out.append(np.trace(p))
    return tuple(out)


def keff_coefficients(g, gamma_prime, omega_c, spacing):
    """Coefficients ``(c1, c2, c3)`` of ``k_eff = c1 D + c2 D^2 + c3 D^3``.

    ``g`` is a coupling matrix or a ``ModeDecomposition``; only the power
    sums ``S_b = sum lambda^b`` enter.
    """
    if not omega_c > 0:
        raise ModelValidityError("the dispersion expansion needs Omega_c > 0")
    if isinstance(g, ModeDecomposition):
        lam = g.eigenvalues
        s1, s2, s3 = (np.sum(lam**b) for b in (1, 2, 3))
        n = lam.size
    else:
        s1, s2, s3 = power_sums(g, 3)
        n = np.asarray(g.values if isinstance(g, CouplingMatrix) else g).shape[0]
    gp, w2 = gamma_prime, omega_c**2
    pref = -1j / (n * spacing)
    c1 = pref * s1 / w2
    c2 = pref * (s2 + 1j * gp * s1) / (2 * w2**2)
    c3 = pref * ((12 * w2 - 3 * gp**2) * s1 + 6j * gp * s2 + 4 * s3) / (12 * w2**3)
    return complex(c1), complex(c2), complex(c3)


def _poly(coeffs, detuning):
    d = np.asarray(detuning, dtype=float)
    c1, c2, c3 = coeffs
    return d * (c1 + d * (c2 + d * c3))


def keff_series(g, gamma_prime, omega_c, spacing, detuning):
    """Third-order small-detuning expansion of the polariton wavevector."""
    return _poly(keff_coefficients(g, gamma_prime, omega_c, spacing), detuning)


def keff_closed_form_coefficients(n, gamma_1d, gamma_prime, omega_c, spacing,
                                  configuration="mirror"):
    """``(c1, c2, c3)`` for the regular-chain configurations with a closed form.

    ``"mirror"``: ``k_p d`` a multiple of pi (one bright mode of rate
    ``N Gamma_1D``). ``"quarter-wave"``: ``k_p d`` an odd multiple of pi/2;
    the result depends on the parity of ``N``.
    """
    if not omega_c > 0:
        raise ModelValidityError("the dispersion expansion needs Omega_c > 0")
    if n < 1:
        raise ModelValidityError("need at least one emitter")
    gd, gp, w2, d = gamma_1d, gamma_prime, omega_c**2, spacing
    c1 = gd / (2 * d * w2)
    if configuration == "mirror":
        c2 = 1j * gd * (2 * gp + n * gd) / (8 * d * w2**2)
        c3 = gd * (12 * w2 - 3 * n * gd * gp - n**2 * gd**2 - 3 * gp**2) / (24 * d * w2**3)
    elif configuration == "quarter-wave":
        if n % 2 == 0:
            c2 = 1j * gd * gp / (4 * d * w2**2)
            c3 = gd * (12 * w2 + 2 * gd**2 - 3 * gp**2) / (24 * d * w2**3)
        else:
            c2 = 1j * gd * (2 * gp + gd / n) / (8 * d * w2**2)
            c3 = gd * (12 * w2 - gd**2 - 3 * gp**2 - 3 * gd * gp / n) / (24 * d * w2**3)
    else:
        raise ValueError(f"unknown configuration {configuration!r}; use 'mirror' or 'quarter-wave'")
    return complex(c1), complex(c2), complex(c3)


def keff_closed_forms(n, gamma_1d, gamma_prime, omega_c, spacing, detuning,
                      configuration="mirror"):
    coeffs = keff_closed_form_coefficients(n, gamma_1d, gamma_prime, omega_c, spacing,
                                           configuration)
    return _poly(coeffs, detuning)


def keff_exact(detuning, modes, gamma_prime, omega_c, spacing):
    """``k_eff`` from ``t_EIT/t0 = exp(i k_eff N d)`` without expansion.

    Each factor's log is taken with ``log1p`` for accuracy near transparency;
    the imaginary part of the summed log is unwrapped along the grid, so
    ``detuning`` should be ordered and finely sampled.
    """
    lam = _eigs(modes)
    d, a, b = _factor_parts(detuning, lam, gamma_prime, omega_c)
    logt = -np.sum(np.log1p(b / a[:, None]), axis=1)
    logt = logt.real + 1j * np.unwrap(logt.imag)
    return -1j * logt / (lam.size * spacing)


def group_velocity(omega_c, spacing, gamma_1d):
    """Zero-detuning group velocity ``2 Omega_c^2 d / Gamma_1D``."""
    if not gamma_1d > 0:
        raise ModelValidityError("gamma_1d must be positive")
    return 2.0 * omega_c**2 * spacing / gamma_1d


@dataclass
class EITSpectrum:
    """EIT transmittance and polariton wavevector on one grid."""

    detuning: np.ndarray
    t: np.ndarray
    k_eff: np.ndarray
    spacing: float

    columns = ("detuning", "T", "re_k_d", "im_k_d")

    def rows(self):
        kd = self.k_eff * self.spacing
        yield from zip(self.detuning, np.abs(self.t) ** 2, kd.real, kd.imag)

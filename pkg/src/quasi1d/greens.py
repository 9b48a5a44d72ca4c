"""Dipole-projected guided-mode Green's functions for quasi-1D reservoirs.

Unit conventions
----------------
The speed of light is set to one, so frequencies and vacuum wavevectors
share a unit. Rates, detunings and couplings returned by the ``coupling``
methods are dimensionless multiples of one reference rate (see
:class:`RateUnits`). A coupling ``g_ij = J_ij + i Gamma_ij / 2`` is the
quantity that enters the linear coherence equations directly.

Every reservoir model exposes the same small surface used by the
collective and spectra modules:

``coupling(x, xp, omega=None)``
    broadcasting evaluation of ``g(x, x')``;
``supports_propagation``
    whether transmission/reflection through the guided channel is defined;
``probe_points(positions)``
    the (left, right) evaluation points bracketing the chain;
``r0``
    reflection of the bare structure in the source-normalized convention.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import cosdg

from .errors import FrequencyRangeError, ModelValidityError, PositionError

__all__ = [
    "RateUnits",
    "CavityModel",
    "WaveguideModel",
    "BandgapModel",
    "LocalModel",
    "TabulatedCoupling",
    "cavity_green",
    "cavity_green_two_mirror",
    "jc_rates",
    "waveguide_coupling",
    "bandgap_coupling",
    "tabulated_coupling",
    "frequency_dependent_cavity",
]

HIGH_Q_LIMIT = 0.1
_POSITION_SLACK = 1e-12


@dataclass(frozen=True)
class RateUnits:
    """Names the reference rate that every rate in a scenario is scaled by.

    ``scale`` is the value of the reference rate in some external unit
    (e.g. s^-1); converting a stored dimensionless rate is one product.
    """

    reference_rate_name: str = "Gamma_prime"
    scale: float = 1.0

    def to_external(self, value):
        return np.asarray(value) * self.scale

    def from_external(self, value):
        return np.asarray(value) / self.scale


_TWO_PI_EXT = np.longdouble("6.283185307179586476925286766559005768")


def _real(x):
    """Float array that keeps extended precision when given it."""
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(float)


def _cos_turns(turns):
    # exact zeros at quarter turns, unlike np.cos(2*pi*t)
    t = _real(turns)
    if t.dtype != np.longdouble:
        return cosdg(360.0 * t)
    frac = t - np.round(t)
    quarter = 4 * frac
    node = (quarter == np.round(quarter)) & (np.abs(np.round(quarter)) == 1)
    return np.where(node, np.longdouble(0), np.cos(_TWO_PI_EXT * frac))


# ---------------------------------------------------------------------------
# Standing-wave cavity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CavityModel:
    """Two-mirror Fabry-Perot cavity supporting a standing guided mode.

    Mirrors sit at ``x = 0`` and ``x = length``; both have the real
    amplitude reflectivity ``reflectivity`` seen from inside. The resonance
    wavevector is ``k_c = 2 pi mode_number / length`` so that ``k_c L`` is a
    multiple of ``2 pi``.

    Parameters
    ----------
    reflectivity : float
        Mirror reflection coefficient ``r`` in (0, 1).
    length : float
        Mirror separation ``L``.
    mode_number : int
        Longitudinal mode index ``m``.
    g0 : float
        Peak atom-cavity coupling (vacuum Rabi rate at an antinode).
    area : float
        Effective mode area ``A``.
    detuning : float
        Default probe-cavity detuning ``Delta_c = omega_p - omega_c`` used
        when no probe frequency is passed to :meth:`coupling`.
    variant : {"high_q", "exact"}
        Which closed form backs :meth:`coupling`.
    """

    reflectivity: float
    length: float
    mode_number: int
    g0: float
    area: float = 1.0
    detuning: float = 0.0
    variant: str = "high_q"

    def __post_init__(self):
        if not 0.0 < self.reflectivity < 1.0:
            raise ModelValidityError("mirror reflectivity must lie in (0, 1)")
        if self.length <= 0 or self.area <= 0:
            raise ModelValidityError("cavity length and mode area must be positive")
        if int(self.mode_number) != self.mode_number or self.mode_number < 1:
            raise ModelValidityError("mode_number must be a positive integer")
        if self.variant not in ("high_q", "exact"):
            raise ModelValidityError(f"unknown cavity variant {self.variant!r}")
        if self.variant == "high_q":
            self.check_high_q()

    @classmethod
    def from_linewidth(cls, kappa, g0, length=0.01, mode_number=1, **kwargs):
        """Build a cavity with a prescribed linewidth ``kappa = (1 - r^2) / L``."""
        loss = kappa * length
        if not 0.0 < loss < 1.0:
            raise ModelValidityError(
                f"kappa * length = {loss:g} must lie in (0, 1) to define a mirror"
            )
        return cls(np.sqrt(1.0 - loss), length, mode_number, g0, **kwargs)

    @property
    def k_c(self):
        return 2.0 * np.pi * self.mode_number / self.length

    @property
    def omega_c(self):
        return self.k_c

    @property
    def kappa(self):
        return (1.0 - self.reflectivity**2) / self.length

    def check_high_q(self):
        if 1.0 - self.reflectivity**2 > HIGH_Q_LIMIT:
            raise ModelValidityError(
                f"high-Q cavity form needs 1 - r^2 <= {HIGH_Q_LIMIT}; got "
                f"{1.0 - self.reflectivity**2:.3g}"
            )

    def mode_profile(self, x):
        """``cos(k_c x)`` with exact nodes."""
        return _cos_turns(self.mode_number * _real(x) / self.length)

    def check_positions(self, x):
        x = np.asarray(x, dtype=float)
        slack = _POSITION_SLACK * self.length
        if np.any(x < -slack) or np.any(x > self.length + slack):
            raise PositionError(f"positions must lie inside the cavity [0, {self.length}]")

    def probe_omega(self, omega=None):
        return self.omega_c + self.detuning if omega is None else omega

    def dipole_scale(self, omega):
        # mu0 omega^2 d^2 / hbar expressed through g0 (coupling defined at omega)
        return self.g0**2 * omega * self.length * self.area

    def coupling(self, x, xp, omega=None):
        omega = self.probe_omega(omega)
        return self.dipole_scale(omega) * cavity_green(x, xp, omega, self)

    supports_propagation = True
    r0 = 0.0

    def probe_points(self, positions):
        self.check_positions(positions)
        return 0.0, float(self.length)


def cavity_green_two_mirror(x, xp, k, length, r_left, r_right, area=1.0):
    """Multiple-reflection Green's function between two point mirrors.

    Mirrors at ``x = 0`` (reflection ``r_left`` for a wave travelling
    leftward, referenced to that plane) and ``x = length`` (``r_right``);
    uniform medium of wavenumber ``k`` in between. Returns ``G_1D`` (the
    Helmholtz Green's function divided by ``area``) for points inside.
    """
    x = _real(x)
    xp = _real(xp)
    dist = np.abs(x - xp)
    total = x + xp
    e = lambda phase: np.exp(1j * k * phase)
    bracket = (
        e(dist)
        + r_left * e(total)
        + r_right * e(2.0 * length - total)
        + r_left * r_right * e(2.0 * length - dist)
    )
    return 1j * bracket / (2.0 * k * area * (1.0 - r_left * r_right * e(2.0 * length)))


def cavity_green(x_i, x_j, omega, model, variant=None):
    """Guided-mode Green's function ``G_1D(x_i, x_j, omega)`` of a cavity.

    ``variant="exact"`` evaluates the four-path multiple-reflection form
    (group velocity equal to ``c``); ``"high_q"`` evaluates its
    single-resonance limit
    ``-(1 / (omega L A)) cos(k_c x_i) cos(k_c x_j) / (Delta_c + i kappa / 2)``.

    Raises
    ------
    PositionError
        If a point lies outside ``[0, L]``.
    ModelValidityError
        If the high-Q form is requested for a low-finesse cavity.
    """
    variant = model.variant if variant is None else variant
    model.check_positions(x_i)
    model.check_positions(x_j)
    if variant == "exact":
        r = model.reflectivity
        return cavity_green_two_mirror(x_i, x_j, omega, model.length, r, r, model.area)
    if variant != "high_q":
        raise ModelValidityError(f"unknown cavity variant {variant!r}")
    model.check_high_q()
    delta_c = omega - model.omega_c
    profile = model.mode_profile(x_i) * model.mode_profile(x_j)
    return -profile / (omega * model.length * model.area) / (delta_c + 0.5j * model.kappa)


def jc_rates(x_i, x_j, delta_c, model):
    """Spin-exchange and decay rates after adiabatic cavity elimination.

    Returns ``(J, Gamma)`` with
    ``J = -g0^2 Delta_c c_i c_j / (Delta_c^2 + kappa^2/4)`` and
    ``Gamma = g0^2 kappa c_i c_j / (Delta_c^2 + kappa^2/4)`` where
    ``c = cos(k_c x)``.
    """
    profile = model.mode_profile(x_i) * model.mode_profile(x_j)
    denom = delta_c**2 + 0.25 * model.kappa**2
    g2 = model.g0**2 * profile / denom
    return -g2 * delta_c, g2 * model.kappa


# ---------------------------------------------------------------------------
# Unstructured waveguide
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WaveguideModel:
    """Translation-invariant single-mode waveguide.

    ``k_p`` defaults to ``2 pi`` so positions are in units of the probe
    wavelength.
    """

    gamma_1d: float
    k_p: float = 2.0 * np.pi

    def __post_init__(self):
        if self.gamma_1d <= 0:
            raise ModelValidityError("gamma_1d must be positive")
        if self.k_p <= 0:
            raise ModelValidityError("k_p must be positive")

    @property
    def wavelength(self):
        return 2.0 * np.pi / self.k_p

    def coupling(self, x, xp, omega=None):
        return waveguide_coupling(x, xp, self)

    supports_propagation = True
    r0 = 0.0

    def probe_points(self, positions):
        positions = np.asarray(positions, dtype=float)
        return (
            float(positions.min() - self.wavelength),
            float(positions.max() + self.wavelength),
        )


def waveguide_coupling(x_i, x_j, model):
    """``g_ij = i (Gamma_1D / 2) exp(i k_p |x_i - x_j|)``."""
    dist = np.abs(_real(x_i) - _real(x_j))
    phase = model.k_p * dist
    # build from cos/sin so the self term has an exactly zero real part
    return 0.5 * model.gamma_1d * (-np.sin(phase) + 1j * np.cos(phase))


# ---------------------------------------------------------------------------
# Photonic-crystal bandgap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BandgapModel:
    """Evanescent coupling inside a photonic-crystal bandgap.

    Parameters
    ----------
    j_max : float
        Spin-exchange rate at a Bloch-mode maximum (sign free).
    kappa_x : float
        Inverse interaction range.
    lattice_constant : float
        Photonic-crystal period ``a``.
    residual_gamma : float
        Residual guided decay at a Bloch maximum; enters as
        ``i residual_gamma / 2`` on the coupling amplitude.
    """

    j_max: float
    kappa_x: float
    lattice_constant: float = 1.0
    residual_gamma: float = 0.0

    def __post_init__(self):
        if self.kappa_x <= 0:
            raise ModelValidityError("kappa_x must be positive")
        if self.lattice_constant <= 0:
            raise ModelValidityError("lattice_constant must be positive")
        if self.residual_gamma < 0:
            raise ModelValidityError("residual_gamma must be non-negative")

    def coupling(self, x, xp, omega=None):
        return bandgap_coupling(x, xp, self)

    supports_propagation = False
    r0 = 0.0

    def probe_points(self, positions):
        raise ModelValidityError(
            "bandgap reservoir has no propagating guided mode at the atomic frequency"
        )


def bandgap_coupling(x_i, x_j, model):
    """``(J_max + i residual/2) cos(pi x_i/a) cos(pi x_j/a) exp(-kappa_x |x_i - x_j|)``."""
    x_i = np.asarray(x_i, dtype=float)
    x_j = np.asarray(x_j, dtype=float)
    a = model.lattice_constant
    bloch = cosdg(180.0 * x_i / a) * cosdg(180.0 * x_j / a)
    envelope = bloch * np.exp(-model.kappa_x * np.abs(x_i - x_j))
    if model.residual_gamma == 0.0:
        return envelope * model.j_max + 0j
    return envelope * complex(model.j_max, 0.5 * model.residual_gamma)


@dataclass(frozen=True)
class LocalModel:
    """Emitters that see only their own guided self-coupling ``J + i Gamma_1D / 2``.

    Cross couplings vanish, so this is the independent-emitter limit of any
    reservoir. Transmission follows from the mode product formula.
    """

    gamma_1d: float
    j_1d: float = 0.0

    def __post_init__(self):
        if self.gamma_1d < 0:
            raise ModelValidityError("gamma_1d must be non-negative")

    def coupling(self, x, xp, omega=None):
        same = np.asarray(x, dtype=float) == np.asarray(xp, dtype=float)
        return np.where(same, complex(self.j_1d, 0.5 * self.gamma_1d), 0j)

    supports_propagation = False
    r0 = 0.0

    def probe_points(self, positions):
        raise ModelValidityError("local model defines no propagation between probe points")


# ---------------------------------------------------------------------------
# Frequency-resolved (non-Markovian) couplings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TabulatedCoupling:
    """Frequency-dependent coupling matrix for a fixed chain.

    Exactly one of ``rule`` (callable ``omega -> (N, N)`` complex matrix)
    and ``table`` (array ``(len(grid), N, N)``) is given. Frequencies are
    probe-atom detunings in the scenario's rate units. Tables are
    interpolated with complex cubic splines, never extrapolated.
    """

    positions: np.ndarray
    grid: np.ndarray
    rule: Optional[Callable] = None
    table: Optional[np.ndarray] = None
    description: str = ""
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=float))
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ModelValidityError("tabulation grid must be strictly increasing")
        if (self.rule is None) == (self.table is None):
            raise ModelValidityError("give exactly one of rule or table")
        if self.table is not None:
            table = np.asarray(self.table, dtype=complex)
            n = self.positions.size
            if table.shape != (grid.size, n, n):
                raise ModelValidityError(
                    f"table shape {table.shape} does not match grid/chain ({grid.size}, {n}, {n})"
                )
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "_spline", CubicSpline(grid, table, axis=0))

    @property
    def n_atoms(self):
        return self.positions.size

    def check_range(self, omega):
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(omega < lo) or np.any(omega > hi):
            raise FrequencyRangeError(
                f"frequency outside the sampled range [{lo:g}, {hi:g}]"
            )

    def matrix(self, omega):
        """Coupling matrix at one frequency."""
        self.check_range(omega)
        if self.rule is not None:
            return np.asarray(self.rule(float(omega)), dtype=complex)
        return self._spline(float(omega))

    def sampled(self, grid=None):
        """Tabulate the rule on ``grid`` (default: own grid) for interpolation."""
        if self.rule is None:
            raise ModelValidityError("model is already tabulated")
        grid = self.grid if grid is None else np.asarray(grid, dtype=float)
        table = np.stack([self.rule(float(w)) for w in grid])
        return TabulatedCoupling(self.positions, grid, table=table, description=self.description)


def tabulated_coupling(omega, i, j, model):
    """Element ``g_ij(omega)`` of a frequency-resolved coupling."""
    return model.matrix(omega)[i, j]


def frequency_dependent_cavity(
    positions, g0, kappa, grid, k_c=2.0 * np.pi, cavity_offset=0.0
):
    """Cavity coupling evaluated at every probe frequency.

    ``g_ij(Delta_A) = -g0^2 cos(k_c x_i) cos(k_c x_j) / (Delta_c + i kappa / 2)``
    with ``Delta_c = Delta_A + cavity_offset`` (``cavity_offset`` is the
    atom-cavity detuning ``omega_A - omega_c``). Its real and imaginary
    parts are the adiabatic-elimination rates at every frequency.
    """
    positions = np.asarray(positions, dtype=float)
    profile = _cos_turns(k_c * positions / (2.0 * np.pi))
    outer = np.outer(profile, profile)
    g0sq = float(g0) ** 2

    def rule(omega):
        return -g0sq * outer / (omega + cavity_offset + 0.5j * kappa)

    desc = f"cavity g0={g0:g} kappa={kappa:g} offset={cavity_offset:g}"
    return TabulatedCoupling(positions, grid, rule=rule, description=desc)

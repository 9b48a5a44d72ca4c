"""1D Helmholtz Green's function of a piecewise-constant dielectric stack.

The Green's function solves ``[d^2/dx^2 + omega^2 eps(x)] G(x, x') = -delta(x - x')``
(``c = 1``) with outgoing conditions in the two semi-infinite leads. It is
assembled from two homogeneous solutions,

* ``phi_L``: purely outgoing to the left, ``exp(-i k_out (x - z_0))`` for ``x < z_0``;
* ``phi_R``: purely outgoing to the right, ``exp(+i k_out (x - z_M))`` for ``x > z_M``;

as ``G(x, x') = phi_L(x_<) phi_R(x_>) / W`` with the position-independent
Wronskian ``W = phi_R phi_L' - phi_R' phi_L``.

Each solution is carried across the stack as the state vector
``(phi, phi')``. That state is continuous at every interface, so interface
matrices are the identity and only the propagation matrix
``[[cos kh, sin(kh)/k], [-k sin kh, cos kh]]`` is needed. Slabs are cut into
sub-steps with bounded evanescent growth and the state is renormalized at
every step, with the log of the discarded scale kept on the side. Each
solution is propagated in the direction in which it grows, which is the
numerically stable direction inside a bandgap.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import ModelValidityError, WronskianError

__all__ = [
    "Slab",
    "LayeredStack",
    "HelmholtzSolution",
    "LayeredReservoir",
    "helmholtz_green",
    "cavity_stack",
]

_MAX_GROWTH = 30.0  # max |Im k| * h per propagation step
_WRONSKIAN_TOL = 1e-12


@dataclass(frozen=True)
class Slab:
    thickness: float
    permittivity: complex

    def __post_init__(self):
        if not self.thickness > 0:
            raise ModelValidityError("slab thickness must be positive")
        if complex(self.permittivity).imag < 0:
            raise ModelValidityError("passive media need Im(eps) >= 0")


@dataclass(frozen=True)
class LayeredStack:
    """Ordered slabs starting at ``origin``, embedded in a uniform outer medium."""

    slabs: Tuple[Slab, ...]
    outer_permittivity: complex = 1.0
    area: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        slabs = tuple(s if isinstance(s, Slab) else Slab(*s) for s in self.slabs)
        object.__setattr__(self, "slabs", slabs)
        if complex(self.outer_permittivity).imag < 0:
            raise ModelValidityError("passive media need Im(eps) >= 0")
        if complex(self.outer_permittivity).real <= 0 and complex(self.outer_permittivity).imag == 0:
            raise ModelValidityError("outer medium must support propagating waves")
        if self.area <= 0:
            raise ModelValidityError("mode area must be positive")

    @property
    def boundaries(self):
        widths = [s.thickness for s in self.slabs]
        return self.origin + np.concatenate([[0.0], np.cumsum(widths)])

    def permittivity(self, x):
        x = np.asarray(x, dtype=float)
        z = self.boundaries
        eps = np.array([self.outer_permittivity] + [s.permittivity for s in self.slabs]
                       + [self.outer_permittivity], dtype=complex)
        return eps[np.searchsorted(z, x, side="right")]


def cavity_stack(length, mirror_thickness, mirror_permittivity, area=1.0):
    """Two identical dielectric mirrors enclosing a vacuum gap of ``length``.

    The gap occupies ``[mirror_thickness, mirror_thickness + length]``.
    """
    mirror = Slab(mirror_thickness, mirror_permittivity)
    return LayeredStack((mirror, Slab(length, 1.0), mirror), area=area)


def _wavenumber(omega, eps):
    k = omega * np.sqrt(complex(eps))
    # outgoing / decaying branch
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    return k


def _propagate(k, h, phi, dphi):
    """Advance the state ``(phi, phi')`` by ``h`` in a medium of wavenumber ``k``."""
    kh = k * h
    c = np.cos(kh)
    # sin(kh)/k without the k -> 0 singularity
    s_over_k = h * np.sinc(kh / np.pi)
    return c * phi + s_over_k * dphi, -k * np.sin(kh) * phi + c * dphi


@dataclass
class _Sweep:
    z: np.ndarray  # checkpoint positions
    k: np.ndarray  # wavenumber of the medium the step from z enters
    phi: np.ndarray
    dphi: np.ndarray
    log: np.ndarray


class HelmholtzSolution:
    """Homogeneous solutions and Green's function of one stack at one frequency."""

    def __init__(self, stack, omega):
        if omega <= 0:
            raise ModelValidityError("frequency must be positive")
        self.stack = stack
        self.omega = float(omega)
        self.k_out = _wavenumber(omega, stack.outer_permittivity)
        self._knorm = abs(self.k_out)
        self._cuts, self._kseg = self._segments()
        self._left = self._sweep_left()
        self._right = self._sweep_right()

    # -- construction -----------------------------------------------------

    def _segments(self):
        cuts = [self.stack.boundaries[0]]
        ks = []
        for slab in self.stack.slabs:
            k = _wavenumber(self.omega, slab.permittivity)
            n = max(1, int(np.ceil(abs(k.imag) * slab.thickness / _MAX_GROWTH)))
            start = cuts[-1]
            for i in range(1, n + 1):
                cuts.append(start + slab.thickness * i / n)
                ks.append(k)
        return np.asarray(cuts), np.asarray(ks, dtype=complex)

    def _norm(self, phi, dphi):
        return np.hypot(abs(phi), abs(dphi) / self._knorm)

    def _sweep_left(self):
        # phi_L, carried rightwards from z_0
        phi, dphi, log = 1.0 + 0j, -1j * self.k_out, 0.0
        n = self._norm(phi, dphi)
        phi, dphi, log = phi / n, dphi / n, np.log(n)
        states = [(phi, dphi, log)]
        for k, z0, z1 in zip(self._kseg, self._cuts[:-1], self._cuts[1:]):
            phi, dphi = _propagate(k, z1 - z0, phi, dphi)
            n = self._norm(phi, dphi)
            phi, dphi, log = phi / n, dphi / n, log + np.log(n)
            states.append((phi, dphi, log))
        phi, dphi, log = (np.array(v) for v in zip(*states))
        return _Sweep(self._cuts, np.append(self._kseg, self.k_out), phi, dphi, log)

    def _sweep_right(self):
        # phi_R, carried leftwards from z_M
        phi, dphi, log = 1.0 + 0j, 1j * self.k_out, 0.0
        n = self._norm(phi, dphi)
        phi, dphi, log = phi / n, dphi / n, np.log(n)
        states = [(phi, dphi, log)]
        for k, z0, z1 in zip(self._kseg[::-1], self._cuts[-2::-1], self._cuts[:0:-1]):
            phi, dphi = _propagate(k, z0 - z1, phi, dphi)
            n = self._norm(phi, dphi)
            phi, dphi, log = phi / n, dphi / n, log + np.log(n)
            states.append((phi, dphi, log))
        phi, dphi, log = (np.array(v[::-1]) for v in zip(*states))
        return _Sweep(self._cuts, np.insert(self._kseg, 0, self.k_out), phi, dphi, log)

    # -- evaluation -------------------------------------------------------

    def phi_left(self, x):
        """``(phi, phi', log_scale)`` of the left-outgoing solution at ``x``.

        The solution is ``phi * exp(log_scale)``; ``phi`` itself is O(1).
        """
        x = np.asarray(x, dtype=float)
        sw = self._left
        idx = np.clip(np.searchsorted(sw.z, x, side="right") - 1, 0, None)
        # left lead: propagate backwards from z_0 with the outer wavenumber
        k = np.where(x < sw.z[0], self.k_out, sw.k[idx])
        phi, dphi = _propagate(k, x - sw.z[idx], sw.phi[idx], sw.dphi[idx])
        return phi, dphi, sw.log[idx]

    def phi_right(self, x):
        """``(phi, phi', log_scale)`` of the right-outgoing solution at ``x``."""
        x = np.asarray(x, dtype=float)
        sw = self._right
        idx = np.clip(np.searchsorted(sw.z, x, side="left"), None, sw.z.size - 1)
        k = np.where(x > sw.z[-1], self.k_out, sw.k[idx])
        phi, dphi = _propagate(k, x - sw.z[idx], sw.phi[idx], sw.dphi[idx])
        return phi, dphi, sw.log[idx]

    def _scaled_wronskian(self, x):
        pl, dpl, ll = self.phi_left(x)
        pr, dpr, lr = self.phi_right(x)
        return pr * dpl - dpr * pl, ll + lr

    def wronskian(self, x):
        """Full Wronskian ``phi_R phi_L' - phi_R' phi_L`` evaluated at ``x``."""
        w, log = self._scaled_wronskian(x)
        return w * np.exp(log)

    def green(self, x, xp):
        """Helmholtz Green's function divided by the mode area, ``G_1D(x, x')``."""
        x, xp = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xp, dtype=float))
        lo = np.minimum(x, xp)
        hi = np.maximum(x, xp)
        pl, dpl, _ = self.phi_left(lo)
        pr_lo, dpr_lo, lr_lo = self.phi_right(lo)
        pr_hi, _, lr_hi = self.phi_right(hi)
        w = pr_lo * dpl - dpr_lo * pl
        if np.any(np.abs(w) < _WRONSKIAN_TOL * self._knorm):
            raise WronskianError(
                "homogeneous solutions are linearly dependent (bound state / resonance)"
            )
        g = pl * pr_hi * np.exp(lr_hi - lr_lo) / w
        return g / self.stack.area

    def scattering(self):
        """Bare-stack amplitudes ``(t, r_left, r_right)``.

        ``r_left`` is the reflection for incidence from the left lead,
        referenced to the first interface; ``r_right`` is for incidence
        from the right, referenced to the last interface. ``t`` is the
        (reciprocal) transmission between those two planes.
        """
        ik = 1j * self.k_out
        phi, dphi, log = self._left.phi[-1], self._left.dphi[-1], self._left.log[-1]
        out_r = 0.5 * (phi + dphi / ik)
        in_r = 0.5 * (phi - dphi / ik)
        r_right = out_r / in_r
        t = np.exp(-log) / in_r
        phi, dphi = self._right.phi[0], self._right.dphi[0]
        in_l = 0.5 * (phi + dphi / ik)
        out_l = 0.5 * (phi - dphi / ik)
        r_left = out_l / in_l
        return complex(t), complex(r_left), complex(r_right)


def helmholtz_green(x, xp, omega, stack):
    """``G_1D(x, x', omega)`` of a layered stack (see :class:`HelmholtzSolution`).

    Raises
    ------
    WronskianError
        If the two outgoing solutions are numerically dependent.
    """
    return HelmholtzSolution(stack, omega).green(x, xp)


@dataclass(frozen=True)
class LayeredReservoir:
    """Chain reservoir backed by a layered stack at a fixed probe frequency.

    Couplings are normalized so that an emitter in a uniform outer medium
    has ``g = i gamma_1d / 2``: ``g = gamma_1d * k_out * A * G_1D``.
    """

    stack: LayeredStack
    omega: float
    gamma_1d: float = 1.0
    _solution: HelmholtzSolution = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.gamma_1d <= 0:
            raise ModelValidityError("gamma_1d must be positive")
        object.__setattr__(self, "_solution", HelmholtzSolution(self.stack, self.omega))

    @property
    def solution(self):
        return self._solution

    def coupling(self, x, xp, omega=None):
        if omega is not None and omega != self.omega:
            sol = HelmholtzSolution(self.stack, omega)
        else:
            sol = self._solution
        return self.gamma_1d * sol.k_out * self.stack.area * sol.green(x, xp)

    supports_propagation = True
    r0 = 0.0

    def probe_points(self, positions):
        positions = np.asarray(positions, dtype=float)
        wavelength = 2.0 * np.pi / self._solution.k_out.real
        return float(positions.min() - wavelength), float(positions.max() + wavelength)

"""Single-excitation dynamics of a coupled emitter chain.

Without drive the amplitudes obey
``dc/dt = i [(Delta + i Gamma'/2) 1 + g] c``. The generator does not
depend on time, so the evolution is evaluated in closed form from the
collective modes, with a matrix-exponential fallback near exceptional
points.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import scipy.linalg

from .collective import CouplingMatrix, decompose
from .errors import Quasi1DError, QuasiDefectiveError

__all__ = ["TimeTrace", "evolve", "zero_offdiagonal", "default_time_grid"]

log = logging.getLogger(__name__)


@dataclass
class TimeTrace:
    times: np.ndarray
    amplitudes: np.ndarray  # (T, N)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def populations(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def total_population(self):
        return self.populations.sum(axis=1)

    @property
    def columns(self):
        n = self.amplitudes.shape[1]
        return ("t",) + tuple(f"p_{i}" for i in range(1, n + 1)) + ("total",)

    def rows(self):
        pops = self.populations
        for t, p, tot in zip(self.times, pops, pops.sum(axis=1)):
            yield (t, *p, tot)


def default_time_grid(gamma_prime, num=2000):
    """``num`` points over ``[0, 8 / Gamma']``."""
    return np.linspace(0.0, 8.0 / gamma_prime, num)


def zero_offdiagonal(g):
    """Non-interacting baseline: keep only the self-couplings."""
    if isinstance(g, CouplingMatrix):
        return CouplingMatrix(np.diag(np.diag(g.values)), dict(g.provenance, noninteracting=True))
    return np.diag(np.diag(np.asarray(g)))


def evolve(g, gamma_prime, detuning, initial, times):
    """Propagate single-excitation amplitudes from ``initial`` over ``times``.

    Raises
    ------
    Quasi1DError
        If the time grid is invalid or the fallback exponential fails.
    """
    a = np.asarray(g.values if isinstance(g, CouplingMatrix) else g, dtype=complex)
    c0 = np.asarray(initial, dtype=complex)
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] < 0 or np.any(np.diff(t) <= 0):
        raise Quasi1DError("time grid must increase from t >= 0")
    offset = detuning + 0.5j * gamma_prime
    method = "modes"
    try:
        modes = decompose(a)
        weights = modes.overlaps(c0)
        phases = np.exp(1j * np.outer(t, modes.eigenvalues + offset))
        amps = (phases * weights) @ modes.eigenvectors.T
    except QuasiDefectiveError as exc:
        log.info("falling back to matrix exponential: %s", exc)
        method = "expm"
        gen = 1j * (a + offset * np.eye(a.shape[0]))
        try:
            amps = np.array([scipy.linalg.expm(gen * ti) @ c0 for ti in t])
        except Exception as err:  # pragma: no cover - scipy failure path
            raise Quasi1DError(f"matrix exponential failed: {err}") from err
        if not np.all(np.isfinite(amps)):
            raise Quasi1DError("matrix exponential produced non-finite amplitudes")
    meta = {"gamma_prime": float(gamma_prime), "detuning": float(detuning), "method": method}
    return TimeTrace(t, amps, meta)

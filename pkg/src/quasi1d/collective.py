"""Coupling matrices of emitter chains and their collective modes.

The coupling matrix is complex symmetric, not Hermitian. Its eigenvectors
are therefore normalized with the transpose (bilinear) product,
``v_a^T v_b = delta_ab``, and completeness reads ``sum_a v_a v_a^T = 1``.
"""

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import scipy.linalg

from .errors import QuasiDefectiveError

__all__ = [
    "EmitterChain",
    "CouplingMatrix",
    "ModeDecomposition",
    "ModeTable",
    "build_coupling_matrix",
    "decompose",
    "tridiagonal_modes",
    "classify_modes",
    "regular_positions",
]

DEFECT_TOL = 1e-10
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class EmitterChain:
    """N identical emitters on a line.

    Positions are sorted on construction; ``order`` maps each sorted slot
    back to the index the emitter had in the input.
    """

    positions: np.ndarray
    gamma_prime: float = 1.0
    order: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.positions, dtype=float))
        if x.ndim != 1 or x.size < 1:
            raise ValueError("a chain needs at least one emitter")
        if self.gamma_prime < 0:
            raise ValueError("gamma_prime must be non-negative")
        order = np.argsort(x, kind="stable")
        object.__setattr__(self, "positions", x[order])
        object.__setattr__(self, "order", order)

    @property
    def n(self):
        return self.positions.size

    @classmethod
    def regular(cls, n, spacing, start=0.0, gamma_prime=1.0):
        return cls(regular_positions(n, spacing, start), gamma_prime)


def regular_positions(n, spacing, start=0.0):
    return start + spacing * np.arange(n, dtype=float)


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense N x N coupling matrix with a note of where it came from."""

    values: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def shifts(self):
        """Real part ``J_1D^ij``."""
        return self.values.real

    @property
    def rates(self):
        """``Gamma_1D^ij = 2 Im g_ij``."""
        return 2.0 * self.values.imag


def build_coupling_matrix(chain, model, omega=None):
    """Fill ``g_ij`` from a reservoir model for every emitter pair.

    The upper triangle is evaluated and mirrored, so the result is exactly
    symmetric.
    """
    x = chain.positions if isinstance(chain, EmitterChain) else np.asarray(chain, dtype=float)
    full = np.asarray(model.coupling(x[:, None], x[None, :], omega), dtype=complex)
    g = np.triu(full) + np.triu(full, 1).T
    provenance = {"model": type(model).__name__, "omega": omega}
    return CouplingMatrix(g, provenance)


def _as_array(g):
    return np.asarray(g.values if isinstance(g, CouplingMatrix) else g, dtype=complex)


@dataclass(frozen=True)
class ModeDecomposition:
    """Eigenvalues and transpose-normalized eigenvectors of a coupling matrix.

    ``eigenvectors[:, a]`` is mode ``a``. ``min_transpose_norm`` is the
    smallest ``|v^T v|`` seen for a unit-norm eigenvector before
    normalization; ``completeness_residual`` is ``max|V V^T - 1|``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    min_transpose_norm: float = 1.0
    completeness_residual: float = 0.0

    @property
    def n(self):
        return self.eigenvalues.size

    @property
    def shifts(self):
        """Collective frequency shifts ``J_xi = Re lambda_xi``."""
        return self.eigenvalues.real

    @property
    def rates(self):
        """Collective guided decay rates ``Gamma_xi = 2 Im lambda_xi``."""
        return 2.0 * self.eigenvalues.imag

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def overlaps(self, vector):
        """Transpose projections ``v_xi^T . vector`` for every mode."""
        return self.eigenvectors.T @ np.asarray(vector)


def _fix_phase(v):
    # deterministic sign: the largest component gets Re > 0 (ties: Im > 0)
    j = np.argmax(np.abs(v) - 1e-12 * np.arange(v.size))
    z = v[j]
    if z.real < 0 or (z.real == 0 and z.imag < 0):
        return -v
    return v


def _transpose_normalize(v):
    s = np.sqrt(v @ v)
    if s.real < 0 or (s.real == 0 and s.imag < 0):
        s = -s
    return v / s


def _orthogonalize_cluster(vectors):
    """Modified Gram-Schmidt under the transpose product, with pivoting."""
    remaining = [v.copy() for v in vectors]
    done = []
    while remaining:
        norms = np.array([abs(v @ v) / np.vdot(v, v).real for v in remaining])
        p = int(np.argmax(norms))
        if norms[p] < DEFECT_TOL and len(remaining) > 1:
            # isotropic vectors: combine the most coupled pair
            best, pair = -1.0, (0, 1)
            for a in range(len(remaining)):
                for b in range(a + 1, len(remaining)):
                    c = abs(remaining[a] @ remaining[b])
                    if c > best:
                        best, pair = c, (a, b)
            a, b = pair
            remaining[a] = remaining[a] + remaining[b]
            p = a
        v = remaining.pop(p)
        v = v / np.linalg.norm(v)
        for u in done:
            v = v - (u @ v) * u
        v = v / np.linalg.norm(v)
        if abs(v @ v) < DEFECT_TOL:
            done.append(v)  # reported by the caller
            continue
        done.append(_transpose_normalize(v))
        remaining = [w - (done[-1] @ w) * done[-1] for w in remaining]
    return done


def decompose(g, cluster_tol=CLUSTER_TOL, defect_tol=DEFECT_TOL):
    """Diagonalize a complex symmetric coupling matrix.

    Eigenvalues are sorted by decreasing imaginary part, then decreasing
    real part, so the brightest (most dissipative) mode comes first.
    Eigenvectors of (near-)degenerate eigenvalues, within
    ``cluster_tol * ||g||``, are re-orthogonalized under the transpose
    product. Each vector is scaled by the root of ``v^T v`` with positive
    real part, after fixing its overall sign so that its largest component
    has positive real part.

    Raises
    ------
    QuasiDefectiveError
        If a unit eigenvector has ``|v^T v| < defect_tol``.
    """
    a = _as_array(g)
    n = a.shape[0]
    scale = max(np.linalg.norm(a, 2), np.finfo(float).tiny)
    lam, vecs = scipy.linalg.eig(a)
    tol = cluster_tol * scale
    key_im = np.round(lam.imag / tol) if tol > 0 else lam.imag
    order = np.lexsort((-lam.real, -key_im))
    lam = lam[order]
    vecs = vecs[:, order]

    raw = np.array([abs(vecs[:, i] @ vecs[:, i]) / np.vdot(vecs[:, i], vecs[:, i]).real
                    for i in range(n)])

    # group eigenvalues closer than tol (single linkage)
    clusters, assigned = [], np.full(n, -1)
    for i in range(n):
        if assigned[i] >= 0:
            continue
        members, stack = [i], [i]
        assigned[i] = len(clusters)
        while stack:
            j = stack.pop()
            near = np.flatnonzero((np.abs(lam - lam[j]) < tol) & (assigned < 0))
            assigned[near] = len(clusters)
            members.extend(near.tolist())
            stack.extend(near.tolist())
        clusters.append(sorted(members))

    out = np.empty_like(vecs)
    min_norm = np.inf
    for members in clusters:
        if len(members) == 1:
            i = members[0]
            min_norm = min(min_norm, raw[i])
            if raw[i] < defect_tol:
                raise QuasiDefectiveError(i, raw[i])
            out[:, i] = _transpose_normalize(_fix_phase(vecs[:, i]))
            continue
        basis = _orthogonalize_cluster([vecs[:, i] for i in members])
        for i, v in zip(members, basis):
            tn = abs(v @ v) / np.vdot(v, v).real
            min_norm = min(min_norm, tn)
            if tn < defect_tol:
                raise QuasiDefectiveError(i, tn)
            out[:, i] = _transpose_normalize(_fix_phase(v))

    residual = float(np.max(np.abs(out @ out.T - np.eye(n)))) if n else 0.0
    return ModeDecomposition(lam, out, float(min_norm), residual)


def tridiagonal_modes(n, j_max, chi):
    """Closed-form modes of the nearest-neighbour Toeplitz coupling.

    ``lambda_xi = J (1 + 2 chi cos(xi pi / (N + 1)))`` and
    ``v_xi,j = sqrt(2 / (N + 1)) sin(xi j pi / (N + 1))`` for
    ``xi, j = 1..N``, returned in order of increasing ``xi``.
    """
    if not 0.0 <= chi < 1.0:
        raise ValueError("chi must satisfy 0 <= chi < 1")
    xi = np.arange(1, n + 1)
    theta = xi * np.pi / (n + 1)
    lam = j_max + 2.0 * j_max * chi * np.cos(theta)
    vecs = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(xi, xi) * np.pi / (n + 1))
    return ModeDecomposition(lam.astype(complex), vecs.astype(complex))


@dataclass(frozen=True)
class ModeTable:
    """Per-mode shifts, rates and bright/dark tags."""

    eigenvalues: np.ndarray
    bright: np.ndarray
    gamma_prime: float
    threshold: float

    @property
    def shifts(self):
        return self.eigenvalues.real

    @property
    def rates(self):
        return 2.0 * self.eigenvalues.imag

    @property
    def n_bright(self):
        return int(np.count_nonzero(self.bright))

    @property
    def n_dark(self):
        return int(self.bright.size - self.n_bright)

    def rows(self):
        for i, lam in enumerate(self.eigenvalues, start=1):
            yield (i, lam.real, lam.imag, lam.real, 2.0 * lam.imag, int(self.bright[i - 1]))

    columns = ("xi", "re_lambda", "im_lambda", "shift_J", "rate_Gamma", "bright")


def classify_modes(modes, gamma_prime, rel_threshold=1e-6):
    """Tag modes as bright or dark.

    A mode is dark when its guided decay rate is below
    ``rel_threshold * max(rates)``.
    """
    lam = modes.eigenvalues if isinstance(modes, ModeDecomposition) else np.asarray(modes)
    rates = 2.0 * lam.imag
    cut = rel_threshold * rates.max() if rates.size else 0.0
    bright = ~(rates < cut)
    return ModeTable(np.asarray(lam, dtype=complex), bright, float(gamma_prime), rel_threshold)

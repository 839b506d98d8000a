"""Small dense linear algebra on top of the kernels: validated frames,
Hermitian eigenbases with a fixed phase convention, unitary logs and
exponentials, polar factors, and circle arithmetic.

Everything here is exact-arithmetic linear algebra; no physics. Matrices
are plain complex ndarrays, frames are thin validated wrappers around
column-orthonormal arrays.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    BranchCutError,
    HermiticityError,
    RankDeficiencyError,
    SkewHermiticityError,
    UnitarityError,
)

TWO_PI = 2.0 * np.pi


def mod_2pi(x):
    """Wrap angles into [0, 2*pi)."""
    # np.mod(-tiny, 2*pi) rounds up to exactly 2*pi; keep the range
    # half-open
    y = np.mod(x, TWO_PI)
    return np.where(y >= TWO_PI, 0.0, y)[()]


def circular_distance(a, b):
    """Shortest distance between two angles on the circle."""
    d = np.mod(np.asarray(a, dtype=float) - b, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def require_hermitian(m, tol=1e-10, name="matrix"):
    m = np.asarray(m)
    defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if defect > tol:
        raise HermiticityError(
            f"{name} is not Hermitian: max |M - M^H| = {defect:.3e} > {tol:.1e}"
        )
    return m


def require_unitary(m, tol=1e-10, name="matrix"):
    m = np.asarray(m)
    n = m.shape[0]
    defect = np.max(np.abs(m.conj().T @ m - np.eye(n)))
    if defect > tol:
        raise UnitarityError(
            f"{name} is not unitary: max |M^H M - I| = {defect:.3e} > {tol:.1e}"
        )
    return m


@dataclass(frozen=True)
class Frame:
    """Column-orthonormal set of vectors, shape (dim, nvec).

    Orthonormality is checked once at construction (tolerance 1e-10);
    downstream code may then multiply freely without revalidating.
    """

    vectors: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] < v.shape[1] or v.shape[1] < 1:
            raise ValueError(f"frame must be (dim, nvec) with dim >= nvec >= 1, got {v.shape}")
        gram = v.conj().T @ v
        defect = np.max(np.abs(gram - np.eye(v.shape[1])))
        if defect > 1e-10:
            raise UnitarityError(
                f"frame columns are not orthonormal: max |F^H F - I| = {defect:.3e}"
            )
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self):
        return self.vectors.shape[0]

    @property
    def nvec(self):
        return self.vectors.shape[1]

    def column(self, j):
        return self.vectors[:, j]


def overlap_matrix(f, g):
    """<f_i | g_j> for two frames (or raw column stacks) of equal dim."""
    a = f.vectors if isinstance(f, Frame) else np.asarray(f)
    b = g.vectors if isinstance(g, Frame) else np.asarray(g)
    return a.conj().T @ b


def _fix_column_phases(v):
    # Convention: the largest-magnitude entry of each column is made real
    # and positive. Deterministic up to ties in |entry|.
    v = v.copy()
    idx = np.argmax(np.abs(v), axis=0)
    for j in range(v.shape[1]):
        piv = v[idx[j], j]
        a = abs(piv)
        if a > 0.0:
            v[:, j] *= piv.conjugate() / a
    return v


def eigh(h, tol=1e-10):
    """Eigenvalues (ascending) and eigenvector Frame of a Hermitian matrix.

    Columns carry the real-positive-pivot phase convention so repeated
    calls on the same matrix give identical frames.
    """
    h = require_hermitian(np.asarray(h, dtype=np.complex128), tol=tol)
    w, v = _kernels.jacobi_eigh(np.ascontiguousarray(h))
    order = np.argsort(w, kind="stable")
    return w[order], Frame(_fix_column_phases(v[:, order]))


def group_degenerate(w, rel_tol=1e-8):
    """Slices of (ascending) eigenvalues equal up to rel_tol * scale."""
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        return []
    scale = max(1.0, float(np.max(np.abs(w))))
    cut = rel_tol * scale
    groups = []
    start = 0
    for i in range(1, w.size):
        if w[i] - w[i - 1] > cut:
            groups.append(slice(start, i))
            start = i
    groups.append(slice(start, w.size))
    return groups


def unitary_exp(a, tol=1e-10):
    """exp(A) for skew-Hermitian A, exactly unitary by spectral form."""
    a = np.asarray(a, dtype=np.complex128)
    defect = np.max(np.abs(a + a.conj().T)) if a.size else 0.0
    if defect > tol:
        raise SkewHermiticityError(
            f"matrix is not skew-Hermitian: max |A + A^H| = {defect:.3e} > {tol:.1e}"
        )
    h = np.ascontiguousarray((-1j * a + (-1j * a).conj().T) / 2)
    w, v = _kernels.jacobi_eigh(h)
    vh = v.conj().T
    return (v * np.exp(1j * w)) @ vh


def unitary_eigenphases(u, tol=1e-8):
    """Sorted eigenphases of a unitary matrix, each in (-pi, pi]."""
    u = require_unitary(np.asarray(u, dtype=np.complex128), tol=tol)
    d, _v = _diagonalize_unitary(u)
    return np.sort(np.angle(d))


def _diagonalize_unitary(u):
    # Two Hermitian stages: cos-part first, then the sin-part restricted
    # to each cos-degenerate cluster. Works because U is normal, so the
    # Hermitian and anti-Hermitian parts commute and share eigenvectors.
    # The wide cluster tolerance is deliberate: eigenphases near 0 or pi
    # have cos gaps quadratic in the phase gap, and resolving them in the
    # cos stage alone would cost eps over that squared gap in accuracy.
    # Inside a cluster the sin gap is linear, so stage two is cheap and
    # sharp; phase pairs unresolved by both stages are themselves equal
    # to within the tolerances, so their mixing is harmless in the log.
    n = u.shape[0]
    c = np.ascontiguousarray((u + u.conj().T) / 2)
    wc, v = _kernels.jacobi_eigh(c)
    order = np.argsort(wc, kind="stable")
    wc, v = wc[order], v[:, order]
    s = (u - u.conj().T) / 2j
    for grp in group_degenerate(wc, rel_tol=1e-4):
        if grp.stop - grp.start < 2:
            continue
        vg = v[:, grp]
        sg = np.ascontiguousarray(vg.conj().T @ s @ vg)
        sg = (sg + sg.conj().T) / 2
        _ws, q = _kernels.jacobi_eigh(sg)
        v[:, grp] = vg @ q
    d = np.einsum("ij,ik,kj->j", v.conj(), u, v)
    return d, v


def matrix_log_unitary(u, branch_tol=1e-6, allow_branch_cut=False, tol=1e-8):
    """Principal skew-Hermitian logarithm of a unitary matrix.

    Eigenphases land in (-pi, pi]. An eigenphase within branch_tol of the
    cut at pi is refused unless allow_branch_cut is set, because a phase
    straddling the cut makes the branch choice arbitrary.
    """
    u = require_unitary(np.asarray(u, dtype=np.complex128), tol=tol, name="log argument")
    d, v = _diagonalize_unitary(u)
    resid = np.max(np.abs(u @ v - v * d))
    if resid > 1e-7:
        raise UnitarityError(
            f"unitary diagonalization failed: eigen residual {resid:.3e}"
        )
    theta = np.angle(d)
    if not allow_branch_cut:
        near = np.pi - np.abs(theta)
        k = int(np.argmin(near))
        if near[k] < branch_tol:
            raise BranchCutError(
                f"eigenphase {theta[k]:+.9f} of eigenvalue {d[k]:.9f} lies within "
                f"{branch_tol:.1e} of the log branch cut at pi"
            )
    log = (v * (1j * theta)) @ v.conj().T
    return (log - log.conj().T) / 2


def polar_unitary(m, min_sv=1e-12):
    """Closest unitary to m (the polar factor).

    Rank deficiency makes the factor non-unique, so a smallest singular
    value at or below min_sv raises instead of silently picking one.
    """
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"polar factor needs a square matrix, got {m.shape}")
    u, smin = _kernels.polar_unitary(m)
    if smin <= min_sv:
        raise RankDeficiencyError(
            f"matrix is numerically rank deficient: smallest singular value "
            f"{smin:.3e} <= {min_sv:.1e}"
        )
    return u

"""Checks that a candidate operator family really is an exact conserved
partner of a Hamiltonian family: the defining commutator identity, the
constancy of its spectrum, and the transport of its eigenspaces by the
actual propagator.
"""

import numpy as np

from . import _kernels
from .errors import TrackingAmbiguityError
from .evolution import evolve
from .linalg import group_degenerate


def _default_times(family, n_times):
    return np.linspace(0.0, family.period, n_times)


def invariance_residual(hamiltonian, invariant, times=None, n_times=100, step=None):
    """max over times of || dI/dt - i[I, H] ||_F (central differences).

    An exact conserved partner drives this to the finite-difference floor;
    anything O(1) means the pair does not belong together.
    """
    if hamiltonian.dim != invariant.dim:
        raise ValueError("families act on different dimensions")
    if times is None:
        times = _default_times(invariant, n_times)
    times = np.asarray(times, dtype=float)
    if step is None:
        step = invariant.period * 1e-6
    ip = invariant.sample(times + step)
    im = invariant.sample(times - step)
    i0 = invariant.sample(times)
    h0 = hamiltonian.sample(times)
    deriv = (ip - im) / (2.0 * step)
    comm = 1j * (i0 @ h0 - h0 @ i0)
    resid = deriv - comm
    return float(np.sqrt(np.max(np.sum(np.abs(resid) ** 2, axis=(1, 2)))))


def _sorted_spectra(family, times):
    ws, vs = _kernels.eigh_batch(family.sample(times))
    order = np.argsort(ws, axis=1, kind="stable")
    ws = np.take_along_axis(ws, order, axis=1)
    vs = np.stack([vs[k][:, order[k]] for k in range(ws.shape[0])])
    return ws, vs


def eigenvalue_drift(invariant, times=None, n_times=100):
    """max over times and levels of |lambda_j(t) - lambda_j(0)|."""
    if times is None:
        times = _default_times(invariant, n_times)
    ws, _vs = _sorted_spectra(invariant, np.asarray(times, dtype=float))
    return float(np.max(np.abs(ws - ws[0])))


def transport_error(hamiltonian, invariant, steps=4096, duration=None,
                    rel_tol=1e-8, psi0=None):
    """How far the propagator carries I(0)-eigenspaces off I(t)-eigenspaces.

    For every degenerate group g and grid time t: project U(t) F_g(0) onto
    the complement of the group's eigenspace of I(t) and take the largest
    Frobenius norm. Exactly conserved partners give integrator-level noise.
    """
    if psi0 is None:
        psi0 = np.zeros(hamiltonian.dim, dtype=np.complex128)
        psi0[0] = 1.0
    traj = evolve(hamiltonian, psi0, steps=steps, duration=duration)
    ws, vs = _sorted_spectra(invariant, traj.times)
    groups = group_degenerate(ws[0], rel_tol=rel_tol)
    sizes0 = [g.stop - g.start for g in groups]
    gaps = np.diff([0.5 * (ws[0][g.start] + ws[0][g.stop - 1]) for g in groups])
    min_gap = float(np.min(gaps)) if gaps.size else np.inf

    worst = 0.0
    for k in range(traj.times.size):
        gk = group_degenerate(ws[k], rel_tol=rel_tol)
        if [g.stop - g.start for g in gk] != sizes0:
            raise TrackingAmbiguityError(
                f"degenerate group structure changed at t={traj.times[k]:.6g}: "
                f"{[g.stop - g.start for g in gk]} vs {sizes0} at t=0"
            )
        for g in groups:
            if abs(ws[k][g.start] - ws[0][g.start]) > 0.25 * min_gap:
                raise TrackingAmbiguityError(
                    f"eigenvalue tracking lost at t={traj.times[k]:.6g}: level "
                    f"moved by {abs(ws[k][g.start] - ws[0][g.start]):.3e}"
                )
            carried = traj.propagators[k] @ vs[0][:, g]
            fg = vs[k][:, g]
            resid = carried - fg @ (fg.conj().T @ carried)
            worst = max(worst, float(np.linalg.norm(resid)))
    return worst


def decompose_state(invariant, t, psi, rel_tol=1e-8):
    """Weights of a state on the eigen-groups of I(t).

    Returns a list of (mean eigenvalue, weight) pairs, weights summing to
    the squared norm of the state.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    w, v = _kernels.jacobi_eigh(np.ascontiguousarray(invariant(t)))
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    out = []
    for g in group_degenerate(w, rel_tol=rel_tol):
        amp = v[:, g].conj().T @ psi
        out.append((float(np.mean(w[g])), float(np.real(np.vdot(amp, amp)))))
    return out

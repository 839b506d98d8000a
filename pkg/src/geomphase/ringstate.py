"""States spread over several ring blocks and their evolution, block by
block and through the assembled direct sum.

Block Hamiltonians never couple different n, so the weight carried by
each block is a constant of motion; the assembled route recomputes those
weights from the full propagated state instead of assuming it.
"""

from dataclasses import dataclass

import numpy as np

from .evolution import Trajectory, evolve
from .models import assemble_blocks


class RingState:
    """Sparse two-component amplitudes per occupied block."""

    def __init__(self, amplitudes):
        blocks = {}
        total = 0.0
        for n, amp in sorted(amplitudes.items()):
            amp = np.asarray(amp, dtype=np.complex128)
            if amp.shape != (2,):
                raise ValueError(f"block {n} amplitude must have shape (2,), got {amp.shape}")
            blocks[int(n)] = amp
            total += float(np.vdot(amp, amp).real)
        if not blocks:
            raise ValueError("state must occupy at least one block")
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"total weight must be 1, got {total:.12f}")
        self.blocks = blocks

    @property
    def occupied(self):
        return tuple(self.blocks)

    def weight(self, n):
        return float(np.vdot(self.blocks[n], self.blocks[n]).real)

    def weights(self):
        return {n: self.weight(n) for n in self.blocks}

    def as_vector(self, order=None):
        order = list(order) if order is not None else sorted(self.blocks)
        return np.concatenate([self.blocks[n] for n in order])


def ring_inner(a, b):
    """Inner product of two sparse ring states."""
    acc = 0.0 + 0.0j
    for n in set(a.blocks) & set(b.blocks):
        acc += np.vdot(a.blocks[n], b.blocks[n])
    return complex(acc)


@dataclass(frozen=True)
class BlockEvolution:
    """Per-block trajectories of one run over a common time axis."""

    duration: float
    weights: dict
    trajectories: dict

    def phases(self):
        """arg <psi_n(0)|psi_n(T)> per occupied block."""
        out = {}
        for n, tr in self.trajectories.items():
            out[n] = float(np.angle(np.vdot(tr.states[0], tr.states[-1])))
        return out


def blockwise_evolve(models, state, steps=4096, duration=None):
    """Evolve each occupied block under its own Hamiltonian.

    duration defaults to the period of the lowest occupied block; blocks
    with other periods are simply run over the same window.
    """
    missing = [n for n in state.occupied if n not in models]
    if missing:
        raise ValueError(f"no model supplied for blocks {missing}")
    if duration is None:
        duration = models[min(state.occupied)].hamiltonian.period
    trajs = {}
    for n in state.occupied:
        amp = state.blocks[n]
        unit = amp / np.linalg.norm(amp)
        trajs[n] = evolve(models[n].hamiltonian, unit, steps=steps, duration=duration)
    return BlockEvolution(float(duration), state.weights(), trajs)


def assembled_evolve(models, state, steps=4096, duration=None):
    """Evolve the direct sum of the occupied blocks as one system.

    Returns (trajectory, weight_drift, phases): the full Trajectory, the
    largest excursion of any block weight from its initial value over the
    whole run, and the per-block endpoint phases.
    """
    order = sorted(state.occupied)
    if duration is None:
        duration = models[order[0]].hamiltonian.period
    family = assemble_blocks(
        [models[n].hamiltonian for n in order], period=float(duration)
    )
    traj = evolve(family, state.as_vector(order), steps=steps, duration=duration)
    offs = np.arange(0, 2 * len(order) + 1, 2)
    drift = 0.0
    phases = {}
    for i, n in enumerate(order):
        seg = traj.states[:, offs[i]:offs[i + 1]]
        w = np.einsum("mi,mi->m", seg.conj(), seg).real
        drift = max(drift, float(np.max(np.abs(w - w[0]))))
        phases[n] = float(np.angle(np.vdot(seg[0], seg[-1])))
    return traj, drift, phases

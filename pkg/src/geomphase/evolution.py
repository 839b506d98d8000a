"""Schroedinger evolution on a uniform grid and the phase bookkeeping on
top of it: total phase of a (nearly) cyclic run, dynamic phase from the
energy expectation, and their difference, the geometric remainder.

The propagator uses one midpoint exponential per interval, so each step
is exactly unitary and constant Hamiltonians are integrated exactly.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import HermiticityError, NonCyclicError, NonCyclicWarning
from .linalg import circular_distance, mod_2pi

_trapezoid = getattr(np, "trapezoid", None)
if _trapezoid is None:  # numpy < 2
    _trapezoid = np.trapz


@dataclass(frozen=True)
class Trajectory:
    """States and cumulative propagators on the time grid of one run."""

    family: object
    times: np.ndarray
    states: np.ndarray
    propagators: np.ndarray

    @property
    def steps(self):
        return self.times.size - 1

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])


@dataclass(frozen=True)
class PhaseReport:
    total: float
    dynamic: float
    geometric: float
    cyclic_defect: float
    steps: int
    convergence: float | None = None


def evolve(family, psi0, steps=4096, duration=None):
    """Integrate i dpsi/dt = H(t) psi over [0, duration].

    duration defaults to the family period; overriding it is how partial
    cycles and common time axes for mismatched blocks are run.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if psi0.shape != (family.dim,):
        raise ValueError(f"state shape {psi0.shape} does not match dim {family.dim}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"initial state must be normalized, |psi| = {nrm:.12f}")
    if duration is None:
        duration = family.period
    times = np.linspace(0.0, float(duration), steps + 1)
    mids = 0.5 * (times[:-1] + times[1:])
    hs = family.sample(mids)
    defect = float(np.max(np.abs(hs - hs.conj().transpose(0, 2, 1))))
    scale = max(1.0, float(np.max(np.abs(hs))))
    if defect > 1e-10 * scale:
        raise HermiticityError(
            f"family {family.label!r} produced non-Hermitian samples: "
            f"max defect {defect:.3e}"
        )
    states, props = _kernels.propagate(hs, float(duration) / steps, psi0)
    return Trajectory(family, times, states, props)


def energy_expectation(traj):
    """Re <psi(t)|H(t)|psi(t)> on the grid edges."""
    hs = traj.family.sample(traj.times)
    return np.einsum("mi,mij,mj->m", traj.states.conj(), hs, traj.states).real


def dynamic_phase(traj):
    """Minus the time integral of the energy expectation (trapezoid)."""
    return float(-_trapezoid(energy_expectation(traj), traj.times))


def cyclic_defect(traj):
    """Distance of the final state from the initial ray."""
    o = np.vdot(traj.states[0], traj.states[-1])
    if abs(o) == 0.0:
        return float(np.sqrt(2.0))
    return float(np.linalg.norm(traj.states[-1] - (o / abs(o)) * traj.states[0]))


def total_phase(traj, warn_tol=1e-4):
    """arg <psi(0)|psi(T)>, warning if the run is visibly non-cyclic."""
    defect = cyclic_defect(traj)
    if defect > warn_tol:
        warnings.warn(
            f"run is not cyclic: final state is {defect:.3e} away from the "
            "initial ray, the total phase is only defined up to that",
            NonCyclicWarning,
            stacklevel=2,
        )
    return float(np.angle(np.vdot(traj.states[0], traj.states[-1])))


def aa_phase(traj, cyclic_tol=1e-2, estimate_convergence=False):
    """Split the phase of a cyclic run into dynamic and geometric parts.

    The geometric part is returned in [0, 2*pi). A cyclic defect above
    cyclic_tol raises: the split is meaningless when the state does not
    come back. estimate_convergence reruns at half the step count and
    reports the circular shift of the geometric part.
    """
    defect = cyclic_defect(traj)
    if defect > cyclic_tol:
        raise NonCyclicError(
            f"cannot decompose phases: cyclic defect {defect:.3e} exceeds "
            f"{cyclic_tol:.1e}",
            defect,
        )
    total = float(np.angle(np.vdot(traj.states[0], traj.states[-1])))
    dyn = dynamic_phase(traj)
    geo = float(mod_2pi(total - dyn))
    conv = None
    if estimate_convergence:
        if traj.steps < 2 or traj.steps % 2:
            raise ValueError("convergence estimate needs an even step count >= 2")
        half = evolve(traj.family, traj.states[0], steps=traj.steps // 2,
                      duration=traj.duration)
        o = np.vdot(half.states[0], half.states[-1])
        geo_half = mod_2pi(float(np.angle(o)) - dynamic_phase(half))
        conv = float(circular_distance(geo, geo_half))
    return PhaseReport(total, dyn, geo, defect, traj.steps, conv)

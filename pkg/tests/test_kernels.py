"""Kernel layer: the pure-numpy build against numpy.linalg oracles, and
the jit build against the pure build. Eigenvector columns are only ever
compared through residuals; the two builds may disagree in the last few
bits of the vectors themselves (different fma contraction) while both
stay valid."""

import functools
import os
import subprocess
import sys

import numpy as np
import pytest

from geomphase import _kernels

pure = _kernels.numpy_kernels


def random_hermitian(rng, n, batch=()):
    a = rng.normal(size=batch + (n, n)) + 1j * rng.normal(size=batch + (n, n))
    return np.ascontiguousarray((a + np.swapaxes(a.conj(), -1, -2)) / 2)


def random_unitary(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return np.ascontiguousarray(q * (np.diagonal(r) / np.abs(np.diagonal(r))))


def both_builds():
    builds = [("pure", pure)]
    try:
        builds.append(("jit", _kernels.get_numba_kernels()))
    except ImportError:
        pass
    return builds


@pytest.mark.parametrize("name,kern", both_builds())
@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_jacobi_matches_numpy_eigenvalues(name, kern, n, rng):
    for _ in range(20):
        h = random_hermitian(rng, n)
        w, v = kern["jacobi_eigh"](h)
        assert np.allclose(np.sort(w), np.linalg.eigvalsh(h), atol=1e-12)
        # eigenvector quality via the residual, not vector comparison
        assert np.max(np.abs(h @ v - v * w)) < 1e-12
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-13


def test_builds_agree_on_eigenvalues(rng):
    builds = both_builds()
    if len(builds) < 2:
        pytest.skip("numba unavailable")
    h = random_hermitian(rng, 6, batch=(40,))
    w_pure, _ = builds[0][1]["eigh_batch"](h)
    w_jit, _ = builds[1][1]["eigh_batch"](h)
    assert np.max(np.abs(np.sort(w_pure) - np.sort(w_jit))) < 1e-12


@pytest.mark.parametrize("name,kern", both_builds())
def test_eigh_batch_consistent_with_single(name, kern, rng):
    h = random_hermitian(rng, 4, batch=(7,))
    wb, vb = kern["eigh_batch"](h)
    for i in range(7):
        assert np.max(np.abs(h[i] @ vb[i] - vb[i] * wb[i])) < 1e-12


@pytest.mark.parametrize("name,kern", both_builds())
def test_polar_unitary(name, kern, rng):
    for n in (1, 2, 4):
        m = np.ascontiguousarray(
            rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        )
        u, smin = kern["polar_unitary"](m)
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) < 1e-12
        h = u.conj().T @ m
        assert np.max(np.abs(h - h.conj().T)) < 1e-11
        assert np.min(np.linalg.eigvalsh((h + h.conj().T) / 2)) > 0
        assert abs(smin - np.linalg.svd(m, compute_uv=False)[-1]) < 1e-10


@pytest.mark.parametrize("name,kern", both_builds())
def test_chain_product_is_ordered(name, kern, rng):
    mats = np.ascontiguousarray(
        rng.normal(size=(6, 3, 3)) + 1j * rng.normal(size=(6, 3, 3))
    )
    want = functools.reduce(np.matmul, mats)
    assert np.max(np.abs(kern["chain_product"](mats) - want)) < 1e-12


@pytest.mark.parametrize("name,kern", both_builds())
def test_propagate_constant_hamiltonian_exact(name, kern, rng):
    h = random_hermitian(rng, 3)
    steps, dt = 64, 0.05
    psi0 = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi0 = np.ascontiguousarray(psi0 / np.linalg.norm(psi0))
    mids = np.ascontiguousarray(np.broadcast_to(h, (steps, 3, 3)))
    states, props = kern["propagate"](mids, dt, psi0)
    w, v = np.linalg.eigh(h)
    for k in (1, steps // 2, steps):
        exact = v @ (np.exp(-1j * w * k * dt) * (v.conj().T @ psi0))
        assert np.max(np.abs(states[k] - exact)) < 1e-12
    assert np.max(np.abs(props[0] - np.eye(3))) == 0.0
    uT = props[steps]
    assert np.max(np.abs(uT.conj().T @ uT - np.eye(3))) < 1e-12


@pytest.mark.parametrize("name,kern", both_builds())
def test_align_frames_parallel_transport(name, kern, rng):
    # random smooth-ish frames: aligned successors have Hermitian positive
    # overlaps and span the same columns as before
    m1, d, k = 9, 4, 2
    frames = np.empty((m1, d, k), dtype=np.complex128)
    base = np.linalg.qr(rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k)))[0]
    frames[0] = base
    for i in range(1, m1):
        step = 0.05 * (rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k)))
        frames[i] = np.linalg.qr(frames[i - 1] + step)[0]
    aligned, smins = kern["align_frames"](np.ascontiguousarray(frames))
    assert np.min(smins) > 0.5
    # interior overlaps become Hermitian positive; the final frame is left
    # alone so the closing overlap keeps the loop's net holonomy
    for i in range(m1 - 2):
        o = aligned[i].conj().T @ aligned[i + 1]
        assert np.max(np.abs(o - o.conj().T)) < 1e-10
        assert np.min(np.linalg.eigvalsh((o + o.conj().T) / 2)) > 0
    for i in range(m1):
        p_old = frames[i] @ frames[i].conj().T
        p_new = aligned[i] @ aligned[i].conj().T
        assert np.max(np.abs(p_old - p_new)) < 1e-12
    assert np.max(np.abs(aligned[-1] - frames[-1])) == 0.0


@pytest.mark.parametrize("name,kern", both_builds())
def test_overlap_smins(name, kern, rng):
    frames = np.stack([random_unitary(rng, 3)[:, :2] for _ in range(5)])
    smins = kern["overlap_smins"](np.ascontiguousarray(frames))
    for i in range(4):
        o = frames[i].conj().T @ frames[i + 1]
        assert abs(smins[i] - np.linalg.svd(o, compute_uv=False)[-1]) < 1e-12


def test_env_flag_selects_pure_path():
    code = (
        "import geomphase; import sys; "
        "sys.exit(0 if not geomphase.USING_NUMBA else 1)"
    )
    env = dict(os.environ, GEOMPHASE_PURE="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env)
    assert proc.returncode == 0


def test_active_build_matches_flag():
    if os.environ.get(_kernels.PURE_ENV, "").strip().lower() in ("", "0", "false"):
        try:
            import numba  # noqa: F401
            assert _kernels.USING_NUMBA
        except ImportError:
            assert not _kernels.USING_NUMBA
    else:
        assert not _kernels.USING_NUMBA

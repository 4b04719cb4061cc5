"""Adiabatic frames: eigenpairs, forces, and nonadiabatic couplings.

A frame collects everything the trajectory algorithms need at one bath
configuration: eigenvalues of h (ascending), gauge-fixed eigenvectors,
Hellmann-Feynman forces F_alpha = -dE_alpha/dQ, and the coupling tensor
d_ab = <a|grad|b>.  For the two-level real-symmetric case the frame is
analytic (mixing angle); larger Hermitian problems go through numpy's
eigensolver with couplings from the off-diagonal Hellmann-Feynman
identity d_ab (E_b - E_a) = <a|grad h|b>.

Spin frames additionally carry the diagonal connection, which is purely
imaginary, so phi_a = -i d_aa is the real geometric-phase rate vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEGENERACY_TOL = 1e-8


class DegenerateFrameError(RuntimeError):
    """Raised when two adiabatic surfaces are too close for stable couplings."""


@dataclass
class AdiabaticFrame:
    energies: np.ndarray  # (n,) ascending
    vectors: np.ndarray  # (n, n) columns are eigenvectors
    forces: np.ndarray  # (n, bath_dim)
    couplings: np.ndarray  # (n, n, bath_dim), antihermitian in the state indices
    config: np.ndarray
    hbar: float
    degenerate: bool = False

    @property
    def n_states(self):
        return len(self.energies)


@dataclass
class SpinFrame(AdiabaticFrame):
    # real (n, 3) array of geometric-phase rate vectors phi_a = -i d_aa
    geo_vectors: np.ndarray = None


def bohr_frequency(frame: AdiabaticFrame, alpha: int, alphap: int) -> float:
    """(E_alpha - E_alpha') / hbar; antisymmetric in the pair, zero on the diagonal."""
    n = frame.n_states
    if not (0 <= alpha < n and 0 <= alphap < n):
        raise IndexError(f"pair ({alpha}, {alphap}) out of range for {n} states")
    return (frame.energies[alpha] - frame.energies[alphap]) / frame.hbar


def shift_vector(frame: AdiabaticFrame, alpha: int, beta: int, P, M: float):
    """S_ab = (E_a - E_b) d_ab / ((P/M) . d_ab).

    Requires a nonvanishing directional coupling along the velocity.
    """
    p = np.asarray(P, dtype=float)
    d = frame.couplings[alpha, beta]
    directional = np.dot(p / M, d)
    if abs(directional) < 1e-300:
        raise ZeroDivisionError("no transition direction: (P/M) . d vanishes")
    return (frame.energies[alpha] - frame.energies[beta]) * d / directional


def _canonical_gauge(vectors):
    """Make the largest-magnitude component of each column real positive."""
    v = vectors.copy()
    for k in range(v.shape[1]):
        idx = int(np.argmax(np.abs(v[:, k])))
        pivot = v[idx, k]
        mag = abs(pivot)
        if mag > 0.0:
            v[:, k] *= pivot.conjugate() / mag
    return v


def _chart_gauge(vectors):
    """Make the first nonvanishing component of each column real positive.

    This is a fixed smooth gauge chart (singular only where the first
    component vanishes); the spin-frame geometric connection refers to it.
    """
    v = vectors.copy()
    for k in range(v.shape[1]):
        idx = 0 if abs(v[0, k]) > 1e-12 else int(np.argmax(np.abs(v[:, k])))
        pivot = v[idx, k]
        mag = abs(pivot)
        if mag > 0.0:
            v[:, k] *= pivot.conjugate() / mag
    return v


def _align_to_reference(vectors, reference):
    """Rotate column phases for maximal positive real overlap with a reference."""
    v = vectors.copy()
    for k in range(v.shape[1]):
        overlap = np.vdot(reference[:, k], v[:, k])
        mag = abs(overlap)
        if mag > 0.0:
            v[:, k] *= overlap.conjugate() / mag
    return v


def _two_level_real_frame(h, dh):
    """Analytic eigenpairs and coupling for a real-symmetric 2x2 matrix field."""
    a, c, dd = h[0, 0].real, h[0, 1].real, h[1, 1].real
    mean = 0.5 * (a + dd)
    delta = 0.5 * (a - dd)
    r = np.hypot(delta, c)
    energies = np.array([mean - r, mean + r])
    if r == 0.0:
        vectors = np.eye(2, dtype=complex)
    else:
        cos2t = delta / r
        sin2t = c / r
        theta = 0.5 * np.arctan2(sin2t, cos2t)
        ct, st = np.cos(theta), np.sin(theta)
        # columns: ground (-sin, cos), excited (cos, sin)
        vectors = np.array([[-st, ct], [ct, st]], dtype=complex)
    return energies, vectors


def build_frame(model, config, reference: AdiabaticFrame | None = None) -> AdiabaticFrame:
    """Adiabatic frame of a canonical-bath model at the configuration `config`.

    The eigenvector gauge is fixed by maximal positive real overlap with
    `reference` when given (the previous frame along a trajectory) and by
    a canonical sign convention otherwise.
    """
    q = np.atleast_1d(np.asarray(config, dtype=float))
    h = model.h_matrix(q)
    dh = np.asarray(model.h_gradient(q), dtype=complex)
    n = model.n_states

    real_symmetric = (
        n == 2 and np.max(np.abs(h.imag)) == 0.0 and np.max(np.abs(dh.imag)) == 0.0
    )
    if real_symmetric:
        energies, vectors = _two_level_real_frame(h, dh)
    else:
        energies, vectors = np.linalg.eigh(h)

    if reference is not None:
        vectors = _align_to_reference(vectors, reference.vectors)
    elif not real_symmetric:
        # the mixing-angle construction is already smooth in Q; flipping
        # signs per-column would break its continuity
        vectors = _canonical_gauge(vectors)

    scale = max(np.max(np.abs(energies)), 1.0)
    gaps = np.abs(energies[:, None] - energies[None, :]) + np.eye(n) * scale
    degenerate = bool(np.min(gaps) < DEGENERACY_TOL * scale)

    # <a| dh/dQ_k |b> sandwich for forces and couplings
    sandwich = np.einsum("ia,kij,jb->kab", vectors.conj(), dh, vectors)
    forces = -np.real(np.einsum("kaa->ak", sandwich))

    couplings = np.zeros((n, n, q.size), dtype=complex)
    if not degenerate:
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                couplings[a, b] = sandwich[:, a, b] / (energies[b] - energies[a])

    return AdiabaticFrame(
        energies=energies,
        vectors=vectors,
        forces=forces,
        couplings=couplings,
        config=q,
        hbar=model.hbar,
        degenerate=degenerate,
    )


def _spin_eigvecs_in_gauge(model, s):
    h = model.h_matrix(s)
    energies, vectors = np.linalg.eigh(h)
    return energies, _chart_gauge(vectors)


def build_spin_frame(model, S, fd_step: float = 1e-6) -> SpinFrame:
    """Frame of a spin-bath model at S, |S| = 1.

    Off-diagonal couplings come from the Hellmann-Feynman sandwich; the
    diagonal connection (which is gauge-dependent and purely imaginary)
    is evaluated by central differences of the eigenvectors held in the
    canonical gauge, so the geometric-phase rate refers to that fixed
    smooth gauge chart on the sphere.
    """
    s = np.asarray(S, dtype=float)
    if abs(np.dot(s, s) - 1.0) > 1e-8:
        raise ValueError(f"|S| must be 1, got |S|^2 = {np.dot(s, s)}")

    energies, vectors = _spin_eigvecs_in_gauge(model, s)
    dh = np.asarray(model.h_gradient(s), dtype=complex)
    n = model.n_states

    scale = max(np.max(np.abs(energies)), 1.0)
    gaps = np.abs(energies[:, None] - energies[None, :]) + np.eye(n) * scale
    degenerate = bool(np.min(gaps) < DEGENERACY_TOL * scale)

    sandwich = np.einsum("ia,kij,jb->kab", vectors.conj(), dh, vectors)
    forces = -np.real(np.einsum("kaa->ak", sandwich))

    couplings = np.zeros((n, n, 3), dtype=complex)
    if not degenerate:
        for a in range(n):
            for b in range(n):
                if a != b:
                    couplings[a, b] = sandwich[:, a, b] / (energies[b] - energies[a])

    # diagonal connection d_aa = <a | grad a> in the fixed gauge chart
    if not degenerate:
        for k in range(3):
            e = np.zeros(3)
            e[k] = fd_step
            _, vp = _spin_eigvecs_in_gauge(model, s + e)
            _, vm = _spin_eigvecs_in_gauge(model, s - e)
            dvec = (vp - vm) / (2.0 * fd_step)
            for a in range(n):
                couplings[a, a, k] = np.vdot(vectors[:, a], dvec[:, a])

    geo_vectors = np.real(-1j * np.einsum("aak->ak", couplings))

    return SpinFrame(
        energies=energies,
        vectors=vectors,
        forces=forces,
        couplings=couplings,
        config=s,
        hbar=model.hbar,
        degenerate=degenerate,
        geo_vectors=geo_vectors,
    )

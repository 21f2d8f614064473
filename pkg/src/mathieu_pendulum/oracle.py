"""Plane-wave discretization of the pendulum Hamiltonian.

The matrix is written directly in the e^{ikq} basis (k = -K..K) and
diagonalized densely, so it shares no code with the Mathieu recurrences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .mathieu import FAMILIES, ModeFamily

CONVERGENCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PlaneWaveHamiltonian:
    b2: float
    cutoff: int
    matrix: np.ndarray

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1)


@dataclass(frozen=True)
class OracleLevel:
    family: ModeFamily
    m: int
    energy: float


def plane_wave_hamiltonian(b2: float, cutoff: int) -> PlaneWaveHamiltonian:
    k = np.arange(-cutoff, cutoff + 1)
    h = np.diag(0.5 * k.astype(float) ** 2)
    # b^2 cos 2q = (b^2/2)(e^{2iq} + e^{-2iq})
    idx = np.arange(len(k) - 2)
    h[idx, idx + 2] = 0.5 * b2
    h[idx + 2, idx] = 0.5 * b2
    return PlaneWaveHamiltonian(float(b2), int(cutoff), h)


def _parity_columns(cutoff: int):
    """Each cos/sin basis vector as w (e_{+k} + s e_{-k}), grouped by family."""
    plus, minus, sign, weight, owner = [], [], [], [], []
    for i, family in enumerate(FAMILIES):
        for k in family.harmonics(cutoff + 1):
            if k > cutoff:
                break
            plus.append(cutoff + k)
            minus.append(cutoff - k)
            sign.append(1.0 if family.is_cosine else -1.0)
            weight.append(0.5 if k == 0 else 1.0 / math.sqrt(2.0))
            owner.append(i)
    return (np.array(plus), np.array(minus), np.array(sign), np.array(weight), np.array(owner))


def parity_blocks(ham: PlaneWaveHamiltonian):
    """Return ({family: block}, largest off-block magnitude).

    Matrix elements are summed pairwise so that the parity cancellations
    between mirrored entries of H are exact in floating point.
    """
    ip, im, s, w, owner = _parity_columns(ham.cutoff)
    h = ham.matrix
    mirrored = h[np.ix_(ip, ip)] + np.outer(s, s) * h[np.ix_(im, im)]
    crossed = s[None, :] * h[np.ix_(ip, im)] + s[:, None] * h[np.ix_(im, ip)]
    t = np.outer(w, w) * (mirrored + crossed)
    same = owner[:, None] == owner[None, :]
    off_block = float(np.max(np.abs(t[~same]))) if np.any(~same) else 0.0
    blocks = {fam: t[np.ix_(owner == i, owner == i)] for i, fam in enumerate(FAMILIES)}
    return blocks, off_block


def _default_cutoff(b2: float, count: int) -> int:
    return 4 * count + math.ceil(2.0 * math.sqrt(abs(b2))) + 8


def _block_energies(b2, cutoff, count):
    blocks, _ = parity_blocks(plane_wave_hamiltonian(b2, cutoff))
    return {fam: np.linalg.eigvalsh(blk)[:count] for fam, blk in blocks.items()}


def oracle_family_energies(b2: float, count: int, cutoff: int | None = None) -> dict:
    """Lowest ``count`` energies in each parity block, converged under cutoff doubling."""
    cutoff = cutoff or _default_cutoff(b2, count)
    if cutoff < 4 * count + math.ceil(2.0 * math.sqrt(abs(b2))):
        raise ValueError(f"cutoff {cutoff} too small for {count} levels at b2={b2}")
    prev = _block_energies(b2, cutoff, count)
    for _ in range(4):
        cutoff *= 2
        cur = _block_energies(b2, cutoff, count)
        shift = max(float(np.max(np.abs(cur[f] - prev[f]))) for f in FAMILIES)
        if shift <= CONVERGENCE_TOL:
            return cur
        prev = cur
    raise ConvergenceError(f"oracle spectrum at b2={b2} not converged at cutoff {cutoff}",
                           iterates=(prev, cur))


def oracle_spectrum(b2: float, cutoff: int, count: int) -> list[OracleLevel]:
    """The ``count`` lowest levels overall, labelled by parity block."""
    per_family = oracle_family_energies(b2, count, cutoff)
    levels = [
        OracleLevel(fam, m, float(e))
        for fam in FAMILIES
        for m, e in enumerate(per_family[fam])
    ]
    levels.sort(key=lambda lv: (lv.energy, FAMILIES.index(lv.family), lv.m))
    return levels[:count]


def oracle_propagator(q, q_prime, beta: float, b2: float, cutoff: int = 64):
    """sum_j exp(-beta E_j) psi_j(q) conj(psi_j(q')) with unit-normalized psi_j."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    ham = plane_wave_hamiltonian(b2, cutoff)
    energies, vecs = np.linalg.eigh(ham.matrix)
    k = ham.wavenumbers
    q = np.asarray(q, dtype=float)
    qp = np.asarray(q_prime, dtype=float)
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    left = np.exp(1j * np.multiply.outer(q, k)) @ vecs * norm
    right = np.exp(1j * np.multiply.outer(qp, k)) @ vecs * norm
    weights = np.exp(-beta * energies)
    if q.ndim == 0 and qp.ndim == 0:
        return float(np.real(np.sum(weights * left * np.conj(right))))
    return np.real((np.atleast_2d(left) * weights) @ np.atleast_2d(right).conj().T)

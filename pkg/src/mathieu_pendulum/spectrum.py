"""Energy levels of the quantum pendulum H = -1/2 d^2/dq^2 + b^2 cos 2q.

Two conventions are carried side by side:

* physical energy ``E = h/2``, the eigenvalue of H;
* the time-sliced kernel's exponent ``paper_energy = h0 - h/2`` with
  ``h0 = 1/8 - b^2``, which multiplies the kernel as ``exp(+i paper_energy T)``.

They always satisfy ``paper_energy + physical_energy == h0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .mathieu import FAMILIES, MAX_B2, ModeFamily, characteristic_values, fourier_coefficients

ARGUMENT_SHIFT = 0.5 * math.pi


def h0(b2: float) -> float:
    """Constant offset produced by the cosine form of the short-time action."""
    return 0.125 - b2


@dataclass(frozen=True)
class EnergyLevel:
    family: ModeFamily
    m: int
    paper_energy: float
    physical_energy: float

    @property
    def label(self) -> str:
        return self.family.label(self.m)


@dataclass(frozen=True)
class SpectrumTable:
    b2: float
    h0: float
    count_per_family: int
    levels: tuple[EnergyLevel, ...]

    def physical_energies(self) -> np.ndarray:
        return np.array([lv.physical_energy for lv in self.levels])

    def by_family(self, family: ModeFamily) -> list[EnergyLevel]:
        family = ModeFamily(family)
        return sorted((lv for lv in self.levels if lv.family is family), key=lambda lv: lv.m)


@dataclass(frozen=True)
class NegativeCouplingSpectrum:
    """Spectrum for b^2 < 0: the |b^2| table plus the argument shift q -> pi/2 + q."""

    requested_b2: float
    table: SpectrumTable
    argument_shift: float = ARGUMENT_SHIFT


def _family_rank(family: ModeFamily) -> int:
    return FAMILIES.index(family)


def energy_levels(b2: float, count_per_family: int, truncation: int | None = None) -> SpectrumTable:
    if not 1 <= count_per_family <= 64:
        raise ValueError(f"count_per_family must be in [1, 64], got {count_per_family}")
    offset = h0(b2)
    levels = []
    for family in FAMILIES:
        chars = characteristic_values(b2, family, count_per_family, truncation)
        for m, h in enumerate(chars):
            physical = 0.5 * float(h)
            levels.append(EnergyLevel(family, m, offset - physical, physical))
    levels.sort(key=lambda lv: (lv.physical_energy, _family_rank(lv.family), lv.m))
    return SpectrumTable(float(b2), offset, count_per_family, tuple(levels))


def negative_coupling_spectrum(b2_negative: float, count_per_family: int,
                               truncation: int | None = None) -> NegativeCouplingSpectrum:
    """Levels for b^2 < 0, which coincide with those at |b^2|.

    Eigenfunctions at negative coupling are the |b^2| ones evaluated at
    ``x + pi/2``; see :func:`eval_negative_coupling`.
    """
    if not -MAX_B2 <= b2_negative < 0:
        raise ValueError(f"b2_negative must lie in [-{MAX_B2}, 0), got {b2_negative!r}")
    table = energy_levels(abs(b2_negative), count_per_family, truncation)
    return NegativeCouplingSpectrum(float(b2_negative), table)


def eval_negative_coupling(b2_negative: float, family: ModeFamily, m: int, x):
    from .mathieu import eval_periodic

    mode = fourier_coefficients(abs(b2_negative), family, m)
    return eval_periodic(mode, np.asarray(x, dtype=float) + ARGUMENT_SHIFT)


def kernel_coefficient(level: EnergyLevel, T: float) -> complex:
    """Real-time spectral weight exp(i * paper_energy * T)."""
    return cmath.exp(1j * level.paper_energy * T)


def omega_series(m: int, b2: float, eps: float) -> complex:
    """The per-slice factor omega_2m(eps) built from the ce_2m coefficients.

    omega = (1/A_0) sum_r (-i)^r A_2r (b^2 eps)^r / (2^r r!) exp(-i r^2 eps / 2)
    """
    if b2 <= 0:
        raise ValueError("omega series needs b2 > 0")
    if eps < 0 or eps > 0.01:
        raise ValueError(f"eps must lie in [0, 0.01], got {eps!r}")
    mode = fourier_coefficients(b2, ModeFamily.CE_EVEN, m)
    a = mode.coeffs
    total = 0j
    scale = 1.0  # (b^2 eps / 2)^r / r!
    for r in range(len(a)):
        if r > 0:
            scale *= 0.5 * b2 * eps / r
        term = ((-1j) ** r) * a[r] * scale * cmath.exp(-0.5j * r * r * eps)
        total += term
        if r > 0 and (scale == 0.0 or abs(term) < 1e-16 * abs(total)) and r > m:
            break
    return total / a[0]


def omega_slope_check(m: int, b2: float, eps: float) -> complex:
    """omega_2m(eps); ``(1 - omega)/(i eps)`` tends to a_2m / 2 as eps -> 0."""
    return omega_series(m, b2, eps)


def omega_slope(m: int, b2: float, eps: float) -> complex:
    return (1.0 - omega_series(m, b2, eps)) / (1j * eps)

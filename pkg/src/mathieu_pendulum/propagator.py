"""Propagator of the pendulum: spectral sum, short-time factors, time slicing.

Real-time kernels use the slice-derived convention, weight exp(+i E_paper T)
per mode.  Imaginary-time kernels use the physical weight exp(-beta E).
Time-sliced composition is only done in imaginary time, where the product
of short-time factors converges monotonically on a fixed grid.
"""
from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .mathieu import (
    FAMILIES,
    ModeFamily,
    eval_modified_bessel_series,
    eval_modified_fourier,
    eval_periodic,
    fourier_coefficients,
    joining_constants,
    periodic_grid,
)
from .spectrum import h0

DEFAULT_MODES = 32
MAX_MODES = 256
BOLTZMANN_FLOOR = 1e-14

PAPER = "paper"  # exp(+i E_paper T), E_paper = h0 - h/2
PHYSICAL = "physical"  # exp(-i E T) or exp(-beta E), E = h/2


class TimeKind(str, enum.Enum):
    REAL_TIME = "REAL_TIME"
    IMAGINARY_TIME = "IMAGINARY_TIME"


class KernelForm(str, enum.Enum):
    EXACT_GAUSSIAN = "EXACT_GAUSSIAN"
    COSINE = "COSINE"


class Splitting(str, enum.Enum):
    LIE = "LIE"
    STRANG = "STRANG"


@dataclass(frozen=True)
class TimeArgument:
    kind: TimeKind
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("time must be finite")
        if self.kind is TimeKind.IMAGINARY_TIME and self.value <= 0:
            raise ValueError(f"beta must be positive, got {self.value}")

    @classmethod
    def real(cls, T: float) -> "TimeArgument":
        return cls(TimeKind.REAL_TIME, float(T))

    @classmethod
    def imaginary(cls, beta: float) -> "TimeArgument":
        return cls(TimeKind.IMAGINARY_TIME, float(beta))


@dataclass(frozen=True)
class KernelEvaluation:
    q: float
    q_prime: float
    time: TimeArgument
    b2: float
    truncation: int
    value: complex
    convention: str


@dataclass(frozen=True, eq=False)
class GridKernel:
    """Kernel sampled at q_i = 2 pi i / G.

    Values are kernel values, so composing two kernels is
    ``A @ B * spacing``.
    """

    matrix: np.ndarray
    time: TimeArgument
    b2: float
    slices: int | None = None
    splitting: Splitting | None = None
    truncation: int | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def grid_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.grid_size

    @property
    def eps(self) -> float | None:
        if self.slices is None:
            return None
        return self.time.value / (self.slices + 1)

    @property
    def grid(self) -> np.ndarray:
        return periodic_grid(self.grid_size)

    def compose(self, other: "GridKernel") -> np.ndarray:
        return self.matrix @ other.matrix * self.spacing


@dataclass(frozen=True)
class ExpansionPoint:
    q: float
    q_prime: float
    y: float
    b: float

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("b must be positive")
        if self.y < 0:
            raise ValueError("hyperbolic angle must be non-negative")


# -- spectral kernel ---------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _mode_bank(b2: float, modes: int):
    """(h values, mode objects) for ``modes`` members of every family."""
    bank = [fourier_coefficients(b2, fam, m) for fam in FAMILIES for m in range(modes)]
    return np.array([md.h for md in bank]), tuple(bank)


def _auto_modes(b2: float, beta: float, modes: int) -> int:
    while modes < MAX_MODES:
        hs, _ = _mode_bank(b2, modes)
        e = 0.5 * hs
        # last member of each family against the ground state
        last = e.reshape(len(FAMILIES), modes)[:, -1]
        if np.max(np.exp(-beta * (last - e.min()))) <= BOLTZMANN_FLOOR:
            break
        modes = min(2 * modes, MAX_MODES)
    return modes


def _weights(hs, time: TimeArgument, b2: float, convention: str):
    e = 0.5 * hs
    if time.kind is TimeKind.IMAGINARY_TIME:
        return np.exp(-time.value * e)
    if convention == PAPER:
        return np.exp(1j * (h0(b2) - e) * time.value)
    return np.exp(-1j * e * time.value)


def _resolve(time, b2, modes, convention):
    if not 1 <= modes <= MAX_MODES:
        raise ValueError(f"modes must be in [1, {MAX_MODES}], got {modes}")
    if time.kind is TimeKind.IMAGINARY_TIME:
        if convention not in (None, PHYSICAL):
            raise ValueError("imaginary-time kernels use the physical convention")
        return _auto_modes(float(b2), time.value, modes), PHYSICAL
    return modes, convention or PAPER


def _basis(bank, x):
    return np.array([eval_periodic(md, x) for md in bank])


def spectral_kernel(q: float, q_prime: float, time: TimeArgument, b2: float,
                    modes: int = DEFAULT_MODES, convention: str | None = None) -> KernelEvaluation:
    """sum over modes of weight * phi(q) phi(q') / pi."""
    modes, convention = _resolve(time, b2, modes, convention)
    hs, bank = _mode_bank(float(b2), modes)
    w = _weights(hs, time, float(b2), convention)
    phi_q = _basis(bank, float(q))
    phi_p = _basis(bank, float(q_prime))
    value = complex(np.sum(w * phi_q * phi_p) / math.pi)
    return KernelEvaluation(float(q), float(q_prime), time, float(b2), modes, value, convention)


def spectral_grid_kernel(time: TimeArgument, b2: float, grid_size: int,
                         modes: int = DEFAULT_MODES, convention: str | None = None) -> GridKernel:
    modes, convention = _resolve(time, b2, modes, convention)
    hs, bank = _mode_bank(float(b2), modes)
    w = _weights(hs, time, float(b2), convention)
    phi = _basis(bank, periodic_grid(grid_size))  # (modes, G)
    mat = (phi.T * w) @ phi / math.pi
    if time.kind is TimeKind.IMAGINARY_TIME:
        mat = mat.real
    return GridKernel(mat, time, float(b2), truncation=modes,
                      metadata={"source": "spectral", "convention": convention})


# -- short-time factors ------------------------------------------------------

def hyperbolic_angle(b: float, eps: float) -> float:
    """y with cosh y = 1 / (2 b eps)."""
    if b <= 0:
        raise ValueError("hyperbolic angle needs b > 0")
    if 2.0 * b * eps >= 1.0:
        raise ValueError(f"2 b eps = {2 * b * eps} >= 1: cosh y would be below 1")
    return math.acosh(1.0 / (2.0 * b * eps))


def expansion_factor_direct(p: ExpansionPoint) -> complex:
    """exp(-2ib [cosh y cos q cos q' + sinh y sin q sin q'])."""
    arg = (math.cosh(p.y) * math.cos(p.q) * math.cos(p.q_prime)
           + math.sinh(p.y) * math.sin(p.q) * math.sin(p.q_prime))
    return cmath.exp(-2j * p.b * arg)


# addition-theorem weights per family: ce terms use Ce/p, se terms the real Se/(i s)
_SERIES_PHASE = {
    ModeFamily.CE_EVEN: 1.0,
    ModeFamily.CE_ODD: -1j,
    ModeFamily.SE_ODD: -1j,
    ModeFamily.SE_EVEN: 1.0,
}


@functools.lru_cache(maxsize=512)
def _addition_weights(b: float, y: float, modes: int, representation: str):
    b2 = b * b
    out = []
    for fam in FAMILIES:
        for m in range(modes):
            md = fourier_coefficients(b2, fam, m)
            if representation == "bessel":
                modified = eval_modified_bessel_series(md, y, b)
            else:
                modified = eval_modified_fourier(md, y)
            if not fam.is_cosine:
                modified = modified / 1j  # real sinh sum
            jc = joining_constants(md).value
            out.append((md, 2.0 * _SERIES_PHASE[fam] * modified / jc))
    return tuple(out)


def expansion_factor_series(p: ExpansionPoint, modes: int, representation: str = "fourier") -> complex:
    """The four-family Mathieu expansion of the P factor, m < ``modes``."""
    if not 1 <= modes <= 64:
        raise ValueError(f"modes must be in [1, 64], got {modes}")
    total = 0j
    for md, weight in _addition_weights(float(p.b), float(p.y), int(modes), representation):
        total += weight * eval_periodic(md, p.q) * eval_periodic(md, p.q_prime)
    return complex(total)


def short_time_kernel(q_j: float, q_j1: float, eps: float, b2: float,
                      form: KernelForm = KernelForm.EXACT_GAUSSIAN) -> complex:
    """One time slice, including the (2 pi i eps)^(-1/2) measure factor.

    EXACT_GAUSSIAN keeps the quadratic displacement; COSINE replaces it by
    1 - cos(q_j - q_j1) and factors the slice as exp(i(1 - (b eps)^2)/eps) P.
    """
    form = KernelForm(form)
    if not 0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 0.5], got {eps!r}")
    measure = 1.0 / cmath.sqrt(2j * math.pi * eps)
    if form is KernelForm.EXACT_GAUSSIAN:
        action = 0.5 * (q_j - q_j1) ** 2 + b2 * eps * eps * (2.0 * math.sin(q_j) * math.sin(q_j1) - 1.0)
        return measure * cmath.exp(1j * action / eps)
    if b2 <= 0:
        raise ValueError("COSINE form needs b2 > 0")
    b = math.sqrt(b2)
    y = hyperbolic_angle(b, eps)
    p = expansion_factor_direct(ExpansionPoint(q_j, q_j1, y, b))
    return measure * cmath.exp(1j * (1.0 - b2 * eps * eps) / eps) * p


# -- imaginary-time slicing --------------------------------------------------

def _free_operator(grid_size: int, eps: float) -> np.ndarray:
    k = np.fft.fftfreq(grid_size, 1.0 / grid_size)
    mult = np.exp(-0.5 * eps * k * k)
    eye = np.eye(grid_size)
    return np.real(np.fft.ifft(mult[:, None] * np.fft.fft(eye, axis=0), axis=0))


def euclidean_trotter_kernel(beta: float, n_slices: int, grid_size: int, b2: float,
                             splitting: Splitting = Splitting.LIE) -> GridKernel:
    """Product of n_slices + 1 short-time Euclidean factors on the grid.

    LIE:    (F V)^(n+1)            with V = exp(-eps b^2 cos 2q)
    STRANG: (V^1/2 F V^1/2)^(n+1)
    where F applies exp(-eps k^2 / 2) exactly in the harmonic basis.
    """
    splitting = Splitting(splitting)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if grid_size < 64 or grid_size & (grid_size - 1):
        raise ValueError(f"grid_size must be a power of two >= 64, got {grid_size}")
    if not 1 <= n_slices <= 4096:
        raise ValueError(f"n_slices must be in [1, 4096], got {n_slices}")
    eps = beta / (n_slices + 1)
    q = periodic_grid(grid_size)
    free = _free_operator(grid_size, eps)
    pot = np.exp(-eps * b2 * np.cos(2.0 * q))
    if splitting is Splitting.LIE:
        step = free * pot[None, :]
    else:
        half = np.sqrt(pot)
        step = half[:, None] * free * half[None, :]
    op = np.linalg.matrix_power(step, n_slices + 1)
    return GridKernel(op * grid_size / (2.0 * math.pi), TimeArgument.imaginary(beta), float(b2),
                      slices=n_slices, splitting=splitting,
                      metadata={"source": "trotter", "convention": PHYSICAL})


def kernel_trace(k: GridKernel) -> float:
    """Trapezoidal trace of an imaginary-time kernel."""
    if k.time.kind is not TimeKind.IMAGINARY_TIME:
        raise ValueError("trace is only defined for imaginary-time kernels")
    return float(np.real(np.trace(k.matrix)) * k.spacing)


def spectral_partition_sum(b2: float, beta: float, modes: int = DEFAULT_MODES) -> float:
    hs, _ = _mode_bank(float(b2), modes)
    return float(np.sum(np.exp(-0.5 * beta * hs)))


@dataclass(frozen=True)
class TrotterStudy:
    splitting: Splitting
    slices: tuple[int, ...]
    errors: tuple[float, ...]
    order: float


def trotter_convergence(b2: float, beta: float, grid_size: int, slices=(8, 16, 32, 64),
                        splitting: Splitting = Splitting.LIE, modes: int = DEFAULT_MODES) -> TrotterStudy:
    """Sup-norm error against the spectral kernel and the fitted order in eps."""
    ref = spectral_grid_kernel(TimeArgument.imaginary(beta), b2, grid_size, modes).matrix
    errors = []
    for n in slices:
        approx = euclidean_trotter_kernel(beta, n, grid_size, b2, splitting).matrix
        errors.append(float(np.max(np.abs(approx - ref))))
    eps = np.array([beta / (n + 1) for n in slices])
    errs = np.array(errors)
    if np.all(errs > 0):
        order = float(np.polyfit(np.log(eps), np.log(errs), 1)[0])
    else:
        order = float("nan")
    return TrotterStudy(Splitting(splitting), tuple(slices), tuple(errors), order)

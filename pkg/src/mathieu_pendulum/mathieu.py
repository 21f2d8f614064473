"""Periodic and modified Mathieu functions for the equation

    y'' + (h - 2 b^2 cos 2x) y = 0.

Characteristic values come from the three-term recurrence of each parity
family, assembled as a symmetric tridiagonal matrix.  Fourier coefficients
are then rebuilt from that eigenvalue by continued-fraction ratios, which
keeps the rapidly decaying tail accurate in a relative sense.  Evaluating
the modified functions at y ~ 2 multiplies tail entries by e^{k y}, so an
absolutely accurate eigenvector is not good enough there.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DegenerateModeError, IllConditionedError
from .specfun import bessel_j_orders

MAX_B2 = 100.0
MAX_COUNT = 256
MAX_TRUNCATION = 512
EIGENVALUE_SHIFT_TOL = 1e-12
TAIL_DECAY_TOL = 1e-14
# coefficients are carried until they drop this far below the peak
TAIL_FLOOR = 1e-250
SQRT2 = math.sqrt(2.0)


class ModeFamily(str, enum.Enum):
    CE_EVEN = "CE_EVEN"  # ce_{2m}:   cos 2r x
    CE_ODD = "CE_ODD"  # ce_{2m+1}: cos (2r+1) x
    SE_ODD = "SE_ODD"  # se_{2m+1}: sin (2r+1) x
    SE_EVEN = "SE_EVEN"  # se_{2m+2}: sin (2r+2) x

    @property
    def is_cosine(self) -> bool:
        return self in (ModeFamily.CE_EVEN, ModeFamily.CE_ODD)

    @property
    def first_harmonic(self) -> int:
        return {"CE_EVEN": 0, "CE_ODD": 1, "SE_ODD": 1, "SE_EVEN": 2}[self.value]

    def harmonics(self, n: int) -> np.ndarray:
        return 2 * np.arange(n) + self.first_harmonic

    def order(self, m: int) -> int:
        """Mathieu order n of the m-th member (ce_n or se_n)."""
        return 2 * m + self.first_harmonic

    def label(self, m: int) -> str:
        return f"{'ce' if self.is_cosine else 'se'}_{self.order(m)}"


FAMILIES = tuple(ModeFamily)


@dataclass(frozen=True, eq=False)
class MathieuMode:
    """One eigenpair: ``coeffs[r]`` multiplies the r-th harmonic of ``family``."""

    family: ModeFamily
    m: int
    b2: float
    h: float
    coeffs: np.ndarray
    truncation: int

    @property
    def order(self) -> int:
        return self.family.order(self.m)

    @property
    def harmonics(self) -> np.ndarray:
        return self.family.harmonics(len(self.coeffs))

    @property
    def leading_coefficient(self) -> float:
        """A_0, A_1, B_1 or B_2: the coefficient of the lowest harmonic."""
        return float(self.coeffs[0])


@dataclass(frozen=True)
class JoiningConstant:
    """p_n or s_n together with the prefactor of the Bessel-product series.

    ``prefactor`` is complex for the sine families: it carries the 1/i of
    the odd representations so that the series returns se_n(iy).
    """

    family: ModeFamily
    m: int
    value: float
    prefactor: complex


def _check_b2(b2: float) -> float:
    b2 = float(b2)
    if not math.isfinite(b2) or b2 < 0 or b2 > MAX_B2:
        raise ValueError(f"b2 must lie in [0, {MAX_B2}], got {b2!r}")
    return b2


def default_truncation(b2: float, m: int) -> int:
    return 2 * m + 16 + math.ceil(2.0 * math.sqrt(b2))


def recurrence_matrix(b2: float, family: ModeFamily, n: int):
    """Diagonal and off-diagonal of the symmetric recurrence matrix.

    For CE_EVEN the first unknown is sqrt(2) A_0, which turns the 2 A_0
    coupling of the r = 1 row into a symmetric sqrt(2) b^2 entry.
    """
    family = ModeFamily(family)
    k = family.harmonics(n).astype(float)
    diag = k * k
    off = np.full(n - 1, float(b2))
    if family is ModeFamily.CE_EVEN:
        off[0] *= SQRT2
    elif family is ModeFamily.CE_ODD:
        diag[0] += b2
    elif family is ModeFamily.SE_ODD:
        diag[0] -= b2
    return diag, off


def _eigvals(b2, family, n, lo, hi):
    diag, off = recurrence_matrix(b2, family, n)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(lo, hi))


def _converged_eigvals(b2, family, lo, hi, truncation=None):
    n = truncation or default_truncation(b2, hi)
    n = max(n, hi + 2)
    prev = _eigvals(b2, family, n, lo, hi)
    while True:
        n2 = 2 * n
        cur = _eigvals(b2, family, n2, lo, hi)
        # bisection is only accurate to a few ulps of the largest diagonal entry
        floor = 8.0 * np.finfo(float).eps * float(family.harmonics(n2)[-1]) ** 2
        tol = np.maximum(EIGENVALUE_SHIFT_TOL * np.maximum(1.0, np.abs(cur)), floor)
        if np.all(np.abs(cur - prev) <= tol):
            return cur, n2
        if n2 >= MAX_TRUNCATION:
            raise ConvergenceError(
                f"characteristic_values({family.value}, b2={b2}) not converged at N={n2}",
                iterates=(prev, cur),
            )
        n, prev = n2, cur


def characteristic_values(b2: float, family: ModeFamily, count: int, truncation: int | None = None) -> np.ndarray:
    """First ``count`` characteristic values of ``family``, increasing."""
    b2 = _check_b2(b2)
    family = ModeFamily(family)
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must be in [1, {MAX_COUNT}], got {count}")
    vals, _ = _converged_eigvals(b2, family, 0, count - 1, truncation)
    if np.any(np.diff(vals) <= 0):
        raise DegenerateModeError(f"characteristic values of {family.value} not strictly increasing at b2={b2}")
    return vals


def _ratio_solution(a, diag, off, j):
    """Solve every recurrence row except row ``j`` with c_j = 1.

    Returns the vector and the row-j mismatch, whose root in ``a`` is the
    characteristic value.
    """
    n = len(diag)
    rho = np.zeros(n)  # c_r / c_{r+1} below the glue row
    for r in range(j):
        den = a - diag[r]
        if r > 0:
            den -= off[r - 1] * rho[r - 1]
        rho[r] = off[r] / den
    sig = np.zeros(n + 1)  # c_r / c_{r-1} above the glue row
    for r in range(n - 1, j, -1):
        den = a - diag[r]
        if r < n - 1:
            den -= off[r] * sig[r + 1]
        sig[r] = off[r - 1] / den
    c = np.zeros(n)
    c[j] = 1.0
    for r in range(j - 1, -1, -1):
        c[r] = rho[r] * c[r + 1]
    for r in range(j + 1, n):
        c[r] = sig[r] * c[r - 1]
    mismatch = a - diag[j]
    if j > 0:
        mismatch -= off[j - 1] * rho[j - 1]
    if j < n - 1:
        mismatch -= off[j] * sig[j + 1]
    return c, mismatch


def _refine(a, diag, off, j):
    c, f = _ratio_solution(a, diag, off, j)
    for _ in range(8):
        if f == 0.0:
            break
        step = 1e-7 * max(1.0, abs(a))
        _, f2 = _ratio_solution(a + step, diag, off, j)
        if f2 == f:
            break
        delta = f * step / (f2 - f)
        c_new, f_new = _ratio_solution(a - delta, diag, off, j)
        if abs(f_new) >= abs(f):
            break
        a, c, f = a - delta, c_new, f_new
        if abs(delta) <= 4 * np.finfo(float).eps * max(1.0, abs(a)):
            break
    return a, c


def _sign_weight(family, k):
    # A.9-A.12 positivity: plain sums for ce, harmonic-weighted for se
    return np.ones_like(k, dtype=float) if family.is_cosine else k.astype(float)


@functools.lru_cache(maxsize=4096)
def _fourier_coefficients(b2: float, family: ModeFamily, m: int, truncation: int | None) -> MathieuMode:
    lo = max(m - 1, 0)
    vals, n = _converged_eigvals(b2, family, lo, m + 1, truncation)
    h = float(vals[m - lo])
    for other, idx in zip(vals, range(lo, m + 2)):
        if idx != m and abs(other - h) < 1e-12 * max(1.0, abs(h)):
            raise DegenerateModeError(
                f"{family.value} modes {m} and {idx} coincide at b2={b2} (h={h!r})"
            )

    diag, off = recurrence_matrix(b2, family, n)
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(m, m))
    j = int(np.argmax(np.abs(vecs[:, 0])))

    length = max(n, j + 32)
    while True:
        diag, off = recurrence_matrix(b2, family, length)
        h_ref, c = _refine(h, diag, off, j)
        peak = np.max(np.abs(c))
        if abs(c[-1]) <= TAIL_FLOOR * peak or length >= 16 * MAX_TRUNCATION:
            break
        length *= 2

    nz = np.nonzero(c)[0]
    c = c[: max(nz[-1] + 1, n)] if len(nz) else c[:n]
    if family is ModeFamily.CE_EVEN:
        c[0] /= SQRT2
        norm = math.sqrt(float(c @ c + c[0] * c[0]))
    else:
        norm = math.sqrt(float(c @ c))
    c = c / norm
    k = family.harmonics(len(c))
    if float(_sign_weight(family, k) @ c) < 0:
        c = -c
    if abs(c[-1]) > TAIL_DECAY_TOL * np.max(np.abs(c)):
        raise ConvergenceError(
            f"{family.label(m)} coefficients at b2={b2} do not decay", iterates=(c[-2], c[-1])
        )
    c.setflags(write=False)
    return MathieuMode(family=family, m=m, b2=b2, h=float(h_ref), coeffs=c, truncation=len(c))


def fourier_coefficients(b2: float, family: ModeFamily, m: int, truncation: int | None = None) -> MathieuMode:
    """The m-th mode of ``family`` with normalized, sign-fixed coefficients."""
    b2 = _check_b2(b2)
    family = ModeFamily(family)
    if not 0 <= m < MAX_COUNT:
        raise ValueError(f"m must be in [0, {MAX_COUNT}), got {m}")
    return _fourier_coefficients(b2, family, int(m), truncation)


def recurrence_residual(mode: MathieuMode) -> float:
    """Largest row residual of the unscaled recurrence, relative to max |coeff|."""
    c = np.asarray(mode.coeffs, dtype=float)
    k = mode.harmonics.astype(float)
    q = mode.b2
    below = np.concatenate([[0.0], c[:-1]])
    above = np.concatenate([c[1:], [0.0]])
    res = (mode.h - k * k) * c - q * (below + above)
    fam = mode.family
    if fam is ModeFamily.CE_EVEN:
        res[0] = mode.h * c[0] - q * c[1]
        if len(c) > 1:
            res[1] = (mode.h - 4.0) * c[1] - q * (2.0 * c[0] + (c[2] if len(c) > 2 else 0.0))
    elif fam is ModeFamily.CE_ODD:
        res[0] = (mode.h - 1.0 - q) * c[0] - q * c[1]
    elif fam is ModeFamily.SE_ODD:
        res[0] = (mode.h - 1.0 + q) * c[0] - q * c[1]
    return float(np.max(np.abs(res)) / np.max(np.abs(c)))


def eval_periodic(mode: MathieuMode, x, derivative: int = 0):
    """ce_n(x) or se_n(x), or its ``derivative``-th derivative."""
    x = np.asarray(x, dtype=float)
    k = mode.harmonics.astype(float)
    arg = np.multiply.outer(x, k)
    c = mode.coeffs
    # d^p/dx^p of cos/sin is a phase shift by p*pi/2
    if mode.family.is_cosine:
        basis = np.cos(arg + 0.5 * math.pi * derivative)
    else:
        basis = np.sin(arg + 0.5 * math.pi * derivative)
    out = basis @ (c * k ** derivative)
    return float(out) if out.ndim == 0 else out


def _signed_log_sum(c, k, y, kind):
    """sum c_r cosh(k_r y) or sum c_r sinh(k_r y) without overflow."""
    ay = abs(y)
    # trailing exact zeros (free modes) leave nothing to truncate
    truncated = len(c) > 0 and c[-1] != 0
    nz = c != 0
    c, k = c[nz], k[nz]
    with np.errstate(over="ignore"):
        mag = np.exp(np.log(np.abs(c)) + k * ay - math.log(2.0))
    damp = np.exp(-2.0 * k * ay)
    if kind == "cosh":
        terms = np.sign(c) * mag * (1.0 + damp)
    else:
        terms = np.sign(c) * mag * (1.0 - damp) * (1.0 if y >= 0 else -1.0)
    if not np.all(np.isfinite(terms)):
        raise OverflowError(f"modified Mathieu series overflows at y={y}")
    total = float(np.sum(terms))
    if truncated and abs(terms[-1]) > 1e-15 * max(abs(total), np.max(np.abs(terms))):
        raise ConvergenceError(f"coefficient tail too short for y={y}", iterates=tuple(terms[-2:]))
    return total


def eval_modified_fourier(mode: MathieuMode, y: float) -> complex:
    """Ce_n(y) = ce_n(iy) (real) or Se_n(y) = se_n(iy) (purely imaginary)."""
    y = float(y)
    if abs(y) > 10.0:
        raise ValueError(f"|y| must be <= 10, got {y}")
    k = mode.harmonics.astype(float)
    c = np.asarray(mode.coeffs)
    if mode.family.is_cosine:
        return complex(_signed_log_sum(c, k, y, "cosh"), 0.0)
    return complex(0.0, _signed_log_sum(c, k, y, "sinh"))


def joining_constants(mode: MathieuMode) -> JoiningConstant:
    """p_n or s_n from boundary values of the periodic function.

    p_2m     =  ce(0) ce(pi/2) / A_0
    p_2m+1   = -ce(0) ce'(pi/2) / (b A_1)
    s_2m+1   =  se'(0) se(pi/2) / (b B_1)
    s_2m+2   =  se'(0) se'(pi/2) / (b^2 B_2)
    """
    fam = mode.family
    half = 0.5 * math.pi
    lead = mode.leading_coefficient
    if fam is ModeFamily.CE_EVEN:
        value = eval_periodic(mode, 0.0) * eval_periodic(mode, half) / lead
        return JoiningConstant(fam, mode.m, value, complex(value / lead))
    if mode.b2 <= 0:
        raise ValueError(f"joining constant of {fam.label(mode.m)} is undefined at b2=0")
    b = math.sqrt(mode.b2)
    if fam is ModeFamily.CE_ODD:
        value = -eval_periodic(mode, 0.0) * eval_periodic(mode, half, 1) / (b * lead)
        return JoiningConstant(fam, mode.m, value, complex(value / lead))
    if fam is ModeFamily.SE_ODD:
        value = eval_periodic(mode, 0.0, 1) * eval_periodic(mode, half) / (b * lead)
        return JoiningConstant(fam, mode.m, value, -value / (1j * lead))
    value = eval_periodic(mode, 0.0, 1) * eval_periodic(mode, half, 1) / (mode.b2 * lead)
    return JoiningConstant(fam, mode.m, value, value / (1j * lead))


def eval_modified_bessel_series(mode: MathieuMode, y: float, b: float) -> complex:
    """Ce_n(y) or Se_n(y) from the Bessel-product expansion.

    The series is built on products J_r(b e^{-y}) J_{r+s}(b e^{y}) with
    s = 0, 1, 1, 2 for CE_EVEN, CE_ODD, SE_ODD, SE_EVEN.
    """
    b = float(b)
    if b <= 0:
        raise ValueError("Bessel-product series needs b > 0")
    if abs(b * b - mode.b2) > 1e-12 * max(1.0, mode.b2):
        raise ValueError(f"b^2 = {b * b} does not match mode parameter {mode.b2}")
    lead = mode.leading_coefficient
    if abs(lead) < 1e-13:
        raise IllConditionedError(
            f"leading coefficient of {mode.family.label(mode.m)} is {lead:.3e}; "
            "Bessel-product series ill-conditioned"
        )
    pref = joining_constants(mode).prefactor
    fam = mode.family
    shift = {"CE_EVEN": 0, "CE_ODD": 1, "SE_ODD": 1, "SE_EVEN": 2}[fam.value]
    c = np.asarray(mode.coeffs)
    n = len(c)
    u, v = b * math.exp(-y), b * math.exp(y)
    ju = bessel_j_orders(n + shift, u)
    jv_ = bessel_j_orders(n + shift, v)
    r = np.arange(n)
    alt = np.where(r % 2 == 0, 1.0, -1.0)
    if fam is ModeFamily.CE_EVEN:
        prod = ju[:n] * jv_[:n]
    elif fam is ModeFamily.CE_ODD:
        prod = ju[:n] * jv_[1 : n + 1] + jv_[:n] * ju[1 : n + 1]
    else:
        prod = ju[:n] * jv_[shift : n + shift] - jv_[:n] * ju[shift : n + shift]
    terms = alt * c * prod
    total = float(np.sum(terms))
    keep = np.nonzero(np.abs(terms) >= 1e-16 * abs(total))[0] if total != 0 else np.array([], int)
    if len(keep):
        total = float(np.sum(terms[: keep[-1] + 1]))
    return complex(pref * total)


def ode_residual(mode: MathieuMode, x_grid, *, shift: float = 0.0, coupling: float | None = None) -> float:
    """max |y'' - 2 b^2 cos(2x) y + h y| / max |y| over ``x_grid``.

    ``shift`` evaluates y(x + shift) and ``coupling`` overrides b^2 in the
    equation, which is how the negative-coupling rule is checked.
    """
    x = np.asarray(x_grid, dtype=float)
    highest = int(mode.harmonics[np.nonzero(np.abs(mode.coeffs) > 1e-16 * np.max(np.abs(mode.coeffs)))[0][-1]])
    if len(x) < 4 * highest:
        raise ValueError(f"grid of {len(x)} points too coarse for harmonic {highest}")
    q = mode.b2 if coupling is None else coupling
    y = eval_periodic(mode, x + shift)
    ypp = eval_periodic(mode, x + shift, 2)
    res = ypp - 2.0 * q * np.cos(2.0 * x) * y + mode.h * y
    return float(np.max(np.abs(res)) / np.max(np.abs(y)))


def periodic_grid(points: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(points) / points


def orthogonality_matrix(b2: float, n_max: int, quad_points: int) -> np.ndarray:
    """Trapezoidal Gram matrix of the first ``n_max`` modes of every family.

    Rows and columns run over CE_EVEN, CE_ODD, SE_ODD, SE_EVEN blocks.
    """
    if quad_points < 8 * n_max:
        raise ValueError(f"quad_points={quad_points} must be >= 8*n_max={8 * n_max}")
    x = periodic_grid(quad_points)
    cols = [
        eval_periodic(fourier_coefficients(b2, fam, m), x)
        for fam in FAMILIES
        for m in range(n_max)
    ]
    vals = np.array(cols)
    return (vals @ vals.T) * (2.0 * math.pi / quad_points)

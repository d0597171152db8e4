"""Trigonometric moments of the two radial heat-kernel weights.

The solution at the origin and the ball average of the initial data are both
weighted Gaussian integrals; against log-periodic data they reduce to the
moment pair

    a(m) = coeff(n) * int_0^inf exp(-z^2) z^power cos(m log z) dz
    b(m) = coeff(n) * int_0^inf exp(-z^2) z^power sin(m log z) dz

with (power, coeff) depending on which weight is in play:

    AverageKernel : power = n + 1, coeff = 2 omega(n) / pi^(n/2)
    DataKernel    : power = n - 1, coeff = n omega(n) / pi^(n/2)

where omega(n) = pi^(n/2) / Gamma(n/2 + 1) is the unit ball volume.  Both
weights integrate to exactly 1 (the m -> 0 limit), and sqrt(a^2 + b^2) lies
strictly inside (0, 1) for every m > 0, which is what makes the band
prescriptions solvable by a one-dimensional root search in m.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SearchFailure
from .quadrature import IntegralResult, QuadratureSpec, integrate_log_oscillatory

__all__ = [
    "KernelFlavor",
    "MomentPair",
    "unit_ball_volume",
    "kernel_moments",
    "kernel_moments_shifted",
    "moment_norm",
    "solve_m",
    "SCAN_GRID_LO",
    "SCAN_GRID_HI",
    "SCAN_GRID_POINTS",
]

# Root scan window for solve_m: 200 log-spaced points, then bisection on the
# first sign-change bracket (smallest root wins when several exist).
SCAN_GRID_LO = 1e-3
SCAN_GRID_HI = 1e2
SCAN_GRID_POINTS = 200


class KernelFlavor(enum.Enum):
    """Which radial weight a moment pair belongs to."""

    AVERAGE = "average"
    DATA = "data"

    def power(self, n: int) -> int:
        """Exponent of z in the weighted integrand."""
        _check_dimension(n)
        return n + 1 if self is KernelFlavor.AVERAGE else n - 1

    def coefficient(self, n: int) -> float:
        """Normalizing constant making the m -> 0 moment exactly 1."""
        _check_dimension(n)
        if self is KernelFlavor.AVERAGE:
            return 2.0 * unit_ball_volume(n) / math.pi ** (n / 2.0)
        return n * unit_ball_volume(n) / math.pi ** (n / 2.0)


@dataclass(frozen=True)
class MomentPair:
    """Cosine and sine moments of one kernel at one frequency."""

    a_value: float
    b_value: float
    m: float
    n: int
    flavor: KernelFlavor
    abs_error_est: float

    def norm(self) -> float:
        return math.hypot(self.a_value, self.b_value)


def _check_dimension(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"dimension n must be a positive integer, got {n!r}")


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1)."""
    _check_dimension(n)
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def _default_spec(power: int) -> QuadratureSpec:
    return QuadratureSpec.for_power(power)


def kernel_moments(n: int, m: float, flavor: KernelFlavor,
                   spec: QuadratureSpec | None = None) -> MomentPair:
    """Moment pair (a, b) at frequency m, computed on the log axis.

    The substitution x = log z turns the endlessly oscillating factor
    trig(m log z) into the uniform frequency m with analytic amplitude
    exp(-e^{2x} + (power+1) x), so the panel-per-period cap applies cleanly.
    """
    _check_dimension(n)
    if not (math.isfinite(m) and m > 0):
        raise DomainError(f"frequency m must be positive, got {m!r}")
    power = flavor.power(n)
    if spec is None:
        spec = _default_spec(power)
    coeff = flavor.coefficient(n)

    def amplitude(x):
        return np.exp(-np.exp(2.0 * x) + (power + 1) * x)

    rc = integrate_log_oscillatory(amplitude, m, "cos", spec)
    rs = integrate_log_oscillatory(amplitude, m, "sin", spec)
    return MomentPair(
        a_value=coeff * rc.value,
        b_value=coeff * rs.value,
        m=m, n=n, flavor=flavor,
        abs_error_est=coeff * (rc.abs_error_est + rs.abs_error_est),
    )


def kernel_moments_shifted(n: int, m: float, flavor: KernelFlavor, shift: float,
                           spec: QuadratureSpec | None = None) -> MomentPair:
    """Finite-time moment pair with trig(m log(z + shift)), shift >= 0.

    shift = 1/sqrt(4t) captures the finite-t solution of log-periodic data
    exactly; shift = 0 reduces to kernel_moments (the t -> infinity limit).
    With a positive shift the oscillation no longer piles up at z = 0, so the
    z-axis engine applies directly.
    """
    _check_dimension(n)
    if not (math.isfinite(m) and m > 0):
        raise DomainError(f"frequency m must be positive, got {m!r}")
    if not (math.isfinite(shift) and shift >= 0):
        raise DomainError(f"shift must be nonnegative, got {shift!r}")
    if shift == 0.0:
        return kernel_moments(n, m, flavor, spec)
    power = flavor.power(n)
    if spec is None:
        spec = _default_spec(power)
    coeff = flavor.coefficient(n)

    from .quadrature import integrate_weighted  # local to avoid cycle noise

    rc = integrate_weighted(lambda z: np.cos(m * np.log(z + shift)), power, spec)
    rs = integrate_weighted(lambda z: np.sin(m * np.log(z + shift)), power, spec)
    return MomentPair(
        a_value=coeff * rc.value,
        b_value=coeff * rs.value,
        m=m, n=n, flavor=flavor,
        abs_error_est=coeff * (rc.abs_error_est + rs.abs_error_est),
    )


def moment_norm(n: int, m: float, flavor: KernelFlavor,
                spec: QuadratureSpec | None = None) -> float:
    """sqrt(a^2 + b^2) at frequency m; lies in (0, 1) for m > 0."""
    return kernel_moments(n, m, flavor, spec).norm()


def solve_m(n: int, ratio: float, flavor: KernelFlavor,
            spec: QuadratureSpec | None = None,
            root_tol: float = 1e-10) -> float:
    """Smallest m with moment_norm(n, m, flavor) = ratio, ratio in (0, 1).

    Scans 200 log-spaced frequencies in [1e-3, 1e2] for the first sign
    change, then bisects until |moment_norm(m) - ratio| <= root_tol.  The
    open-interval requirement on ratio is structural: the norm equals 1 only
    in the degenerate m -> 0 limit and never vanishes at finite m.
    """
    _check_dimension(n)
    if not (0.0 < ratio < 1.0):
        raise DomainError(
            f"ratio must lie strictly inside (0, 1), got {ratio!r}; the "
            "moment norm only attains (0, 1) at positive frequencies")
    if not (root_tol > 0):
        raise DomainError(f"root_tol must be positive, got {root_tol!r}")

    def residual(m):
        return moment_norm(n, m, flavor, spec) - ratio

    grid = np.geomspace(SCAN_GRID_LO, SCAN_GRID_HI, SCAN_GRID_POINTS)
    lo = hi = None
    r_lo = residual(grid[0])
    if r_lo == 0.0:
        return float(grid[0])
    for i in range(1, len(grid)):
        r_hi = residual(grid[i])
        if r_hi == 0.0:
            return float(grid[i])
        if (r_lo > 0) != (r_hi > 0):
            lo, hi = float(grid[i - 1]), float(grid[i])
            break
        r_lo = r_hi
    if lo is None:
        raise SearchFailure(
            f"no sign change of moment_norm - {ratio} on the scan grid "
            f"[{SCAN_GRID_LO}, {SCAN_GRID_HI}] ({SCAN_GRID_POINTS} points)")

    sign_lo = r_lo > 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if abs(r_mid) <= root_tol:
            return mid
        if (r_mid > 0) == sign_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * mid:
            break
    mid = 0.5 * (lo + hi)
    if abs(residual(mid)) <= root_tol:
        return mid
    raise SearchFailure(
        f"bisection stalled: residual {residual(mid):.3e} above root_tol {root_tol}")

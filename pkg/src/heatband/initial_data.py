"""Closed-form family of radial initial data with known oscillation bands.

Every construction in the band prescriptions is assembled from a small set
of expression variants (log-periodic sines, their average preimages, a
doubly-log sine, zero-mean trapezoid waves, sparse bump trains, and sums or
negations of these).  Keeping the family closed-form means the ball average

    H(tau) = (n / tau^n) * int_0^tau phi(r) r^(n-1) dr,      H(0) = phi(0)

and the exact asymptotic band (liminf, limsup) of phi are either available
symbolically or computable by a dedicated exact/adaptive integrator, so the
numerical probes always have an honest reference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, RangeError, UnsupportedExpression
from .quadrature import integrate_interval

__all__ = [
    "PeriodicFunction", "TrapezoidWave", "TrigPolynomial",
    "CenterLaw", "GeometricCenters", "DoubleExpCenters",
    "InitialDataExpr", "Constant", "LogSine", "LogSineAvgPreimage",
    "LogLogSine", "PeriodicZeroMean", "BumpTrain", "SlowFromPeriodic",
    "PeriodicOfLog", "Sum", "Negate",
    "eval_phi", "closed_H", "numeric_H", "phi_from_H",
    "analytic_band_phi", "sup_abs_phi", "band_witnesses",
    "to_json", "from_json", "dumps", "loads",
    "SCHEMA_ID",
]

SCHEMA_ID = "idexpr/1"

TWO_PI = 2.0 * math.pi

# Largest double; centers or tau beyond this are not representable.
_FLOAT_MAX = float(np.finfo(float).max)
_LOG_FLOAT_MAX = math.log(_FLOAT_MAX)

# Bernoulli numbers B_0 .. B_10 with B_1 = -1/2, for Faulhaber sums
# S_p(N) = sum_{q=0}^{N-1} q^p used by the exact periodic radial integral.
_BERNOULLI = (1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0,
              0.0, -1.0 / 30.0, 0.0, 5.0 / 66.0)


def _faulhaber(p: int, n_terms: float) -> float:
    """sum_{q=0}^{N-1} q^p for integer p >= 0 and (possibly huge) integer N."""
    if p + 1 >= len(_BERNOULLI):
        raise DomainError(f"Faulhaber sums implemented up to p = {len(_BERNOULLI) - 2}")
    total = 0.0
    for j in range(p + 1):
        total += math.comb(p + 1, j) * _BERNOULLI[j] * n_terms ** (p + 1 - j)
    return total / (p + 1)


# ---------------------------------------------------------------------------
# 2 pi periodic building blocks


class PeriodicFunction:
    """A 2 pi periodic function with exact derivative and extrema."""

    def value(self, theta):
        raise NotImplementedError

    def derivative(self, theta):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def extrema(self) -> tuple[float, float]:
        raise NotImplementedError


@dataclass(frozen=True)
class TrapezoidWave(PeriodicFunction):
    """Zero-mean 2 pi periodic trapezoid wave.

    Shape over one period: ramp 0 -> v_max over ramp_width, plateau at v_max,
    ramp down to 0, ramp on down to v_min, plateau at v_min, ramp back to 0.
    The two plateau lengths are solved from

        P_plus + P_minus = 2 pi - 4 w
        v_max (P_plus + w) + v_min (P_minus + w) = 0       (zero mean)

    Parameter combinations that would need a negative plateau are rejected.
    """

    v_max: float
    v_min: float
    ramp_width: float = math.pi / 8.0

    def __post_init__(self):
        if not (math.isfinite(self.v_max) and self.v_max > 0):
            raise DomainError(f"v_max must be positive, got {self.v_max!r}")
        if not (math.isfinite(self.v_min) and self.v_min < 0):
            raise DomainError(f"v_min must be negative, got {self.v_min!r}")
        if not (0.0 < self.ramp_width < math.pi / 4.0):
            raise DomainError(
                f"ramp_width must lie in (0, pi/4), got {self.ramp_width!r}")
        p_plus, p_minus = self._plateaus()
        if p_plus < 0 or p_minus < 0:
            raise DomainError(
                "extremes too lopsided for a zero-mean trapezoid: plateau "
                f"lengths ({p_plus:.6g}, {p_minus:.6g}) must be nonnegative")

    def _plateaus(self) -> tuple[float, float]:
        w = self.ramp_width
        length = TWO_PI - 4.0 * w
        p_plus = (-w * (self.v_max + self.v_min) - self.v_min * length) \
            / (self.v_max - self.v_min)
        return p_plus, length - p_plus

    @cached_property
    def breakpoints(self) -> tuple[float, ...]:
        w = self.ramp_width
        p_plus, p_minus = self._plateaus()
        return (0.0, w, w + p_plus, 2.0 * w + p_plus, 3.0 * w + p_plus,
                3.0 * w + p_plus + p_minus, TWO_PI)

    @cached_property
    def knot_values(self) -> tuple[float, ...]:
        return (0.0, self.v_max, self.v_max, 0.0, self.v_min, self.v_min, 0.0)

    def value(self, theta):
        th = np.mod(theta, TWO_PI)
        return np.interp(th, self.breakpoints, self.knot_values)

    def derivative(self, theta):
        th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        bp = np.asarray(self.breakpoints)
        kv = np.asarray(self.knot_values)
        slopes = np.diff(kv) / np.diff(bp)
        idx = np.clip(np.searchsorted(bp, th, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def mean(self) -> float:
        return 0.0

    def extrema(self) -> tuple[float, float]:
        return (self.v_min, self.v_max)

    def extremizer_args(self) -> tuple[float, float]:
        """Phase of the min plateau center and of the max plateau center."""
        bp = self.breakpoints
        return (0.5 * (bp[4] + bp[5]), 0.5 * (bp[1] + bp[2]))

    def segments(self) -> tuple[tuple[float, float, float, float], ...]:
        """Linear pieces as (theta0, theta1, a, b) with value = a + b theta."""
        bp = self.breakpoints
        kv = self.knot_values
        out = []
        for i in range(len(bp) - 1):
            if bp[i + 1] == bp[i]:
                continue
            b = (kv[i + 1] - kv[i]) / (bp[i + 1] - bp[i])
            a = kv[i] - b * bp[i]
            out.append((bp[i], bp[i + 1], a, b))
        return tuple(out)


@dataclass(frozen=True)
class TrigPolynomial(PeriodicFunction):
    """const + sum_j cos_coeffs[j-1] cos(j theta) + sin_coeffs[j-1] sin(j theta)."""

    const: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(s) for s in self.sin_coeffs))
        for c in (self.const, *self.cos_coeffs, *self.sin_coeffs):
            if not math.isfinite(c):
                raise DomainError("trig polynomial coefficients must be finite")

    def value(self, theta):
        th = np.asarray(theta, dtype=float)
        out = np.full_like(th, self.const)
        for j, c in enumerate(self.cos_coeffs, start=1):
            if c:
                out = out + c * np.cos(j * th)
        for j, s in enumerate(self.sin_coeffs, start=1):
            if s:
                out = out + s * np.sin(j * th)
        return out

    def derivative(self, theta):
        th = np.asarray(theta, dtype=float)
        out = np.zeros_like(th)
        for j, c in enumerate(self.cos_coeffs, start=1):
            if c:
                out = out - c * j * np.sin(j * th)
        for j, s in enumerate(self.sin_coeffs, start=1):
            if s:
                out = out + s * j * np.cos(j * th)
        return out

    def mean(self) -> float:
        return self.const

    def derivative_poly(self) -> "TrigPolynomial":
        j_max = max(len(self.cos_coeffs), len(self.sin_coeffs))
        cos = [0.0] * j_max
        sin = [0.0] * j_max
        for j in range(1, j_max + 1):
            c = self.cos_coeffs[j - 1] if j <= len(self.cos_coeffs) else 0.0
            s = self.sin_coeffs[j - 1] if j <= len(self.sin_coeffs) else 0.0
            cos[j - 1] = s * j
            sin[j - 1] = -c * j
        return TrigPolynomial(0.0, tuple(cos), tuple(sin))

    def _critical_points(self) -> np.ndarray:
        """Zeros of the derivative over [0, 2 pi), bisected to ~1e-15."""
        grid = np.linspace(0.0, TWO_PI, 4097)
        dv = self.derivative(grid)
        roots = []
        for i in range(len(grid) - 1):
            a, b, fa, fb = grid[i], grid[i + 1], dv[i], dv[i + 1]
            if fa == 0.0:
                roots.append(a)
                continue
            if (fa > 0) == (fb > 0):
                continue
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = float(self.derivative(mid))
                if fm == 0.0:
                    a = b = mid
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
        return np.asarray(roots)

    def extrema(self) -> tuple[float, float]:
        lo, hi = self.extrema_with_args()[0]
        return lo, hi

    def extrema_with_args(self):
        """((min, max), (argmin, argmax)) over one period."""
        crits = self._critical_points()
        if crits.size == 0:
            return (self.const, self.const), (0.0, 0.0)
        vals = self.value(crits)
        i_lo = int(np.argmin(vals))
        i_hi = int(np.argmax(vals))
        return ((float(vals[i_lo]), float(vals[i_hi])),
                (float(crits[i_lo]), float(crits[i_hi])))

    def abs_max(self) -> float:
        lo, hi = self.extrema()
        return max(abs(lo), abs(hi))


# ---------------------------------------------------------------------------
# Center laws for bump trains


class CenterLaw:
    """Where the bumps of a BumpTrain sit."""

    def representable_centers(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class GeometricCenters(CenterLaw):
    """Centers c_k = base^k, k >= 1, base > 1."""

    base: float = math.e

    def __post_init__(self):
        if not (math.isfinite(self.base) and self.base > 1.0):
            raise DomainError(f"base must exceed 1, got {self.base!r}")

    @cached_property
    def _centers(self) -> np.ndarray:
        k_max = int(math.floor(_LOG_FLOAT_MAX / math.log(self.base)))
        ks = np.arange(1, k_max + 1, dtype=float)
        with np.errstate(over="ignore"):
            cs = np.power(self.base, ks)
        return cs[np.isfinite(cs)]

    def representable_centers(self) -> np.ndarray:
        return self._centers


@dataclass(frozen=True)
class DoubleExpCenters(CenterLaw):
    """Doubly exponential centers log(c_k + 2) = exp(2 k pi + phase), k >= 0.

    parity 'peak' uses phase pi/2 (the doubly-log sine tops out there),
    'trough' uses 3 pi / 2.  Only the k = 0 center of either parity fits in a
    double (peak: ~1.2e2, trough: ~2.6e48); the k >= 1 centers exist only as
    stored inner exponents, which is all the analytic band needs.
    """

    parity: str = "peak"

    def __post_init__(self):
        if self.parity not in ("peak", "trough"):
            raise DomainError(f"parity must be 'peak' or 'trough', got {self.parity!r}")

    def inner_exponent(self, k: int) -> float:
        phase = math.pi / 2.0 if self.parity == "peak" else 3.0 * math.pi / 2.0
        return 2.0 * k * math.pi + phase

    @cached_property
    def _centers(self) -> np.ndarray:
        out = []
        k = 0
        while True:
            inner = self.inner_exponent(k)
            if inner > math.log(_LOG_FLOAT_MAX):
                break
            out.append(math.exp(math.exp(inner)) - 2.0)
            k += 1
        return np.asarray(out)

    def representable_centers(self) -> np.ndarray:
        return self._centers


# ---------------------------------------------------------------------------
# Expression family


class InitialDataExpr:
    """Base class; subclasses are frozen dataclasses."""

    def _values(self, tau: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(InitialDataExpr):
    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise DomainError(f"constant must be finite, got {self.c!r}")

    def _values(self, tau):
        return np.full_like(tau, self.c)


@dataclass(frozen=True)
class LogSine(InitialDataExpr):
    """amplitude * sin(m log(tau + 1)) + offset."""

    amplitude: float
    m: float
    offset: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise DomainError(f"amplitude must be positive, got {self.amplitude!r}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise DomainError(f"m must be positive, got {self.m!r}")
        if not math.isfinite(self.offset):
            raise DomainError(f"offset must be finite, got {self.offset!r}")

    def _values(self, tau):
        return self.amplitude * np.sin(self.m * np.log1p(tau)) + self.offset


@dataclass(frozen=True)
class LogSineAvgPreimage(InitialDataExpr):
    """The initial data whose ball average is exactly a log sine.

    amplitude * [ sin(m log(tau+1)) + (m tau / (n (tau+1))) cos(m log(tau+1)) ]
    + offset.  Its band widens over the average's by the factor
    sqrt(1 + m^2/n^2), since the cosine term saturates at m/n.
    """

    amplitude: float
    m: float
    offset: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise DomainError(f"amplitude must be positive, got {self.amplitude!r}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise DomainError(f"m must be positive, got {self.m!r}")
        if not math.isfinite(self.offset):
            raise DomainError(f"offset must be finite, got {self.offset!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")

    def _values(self, tau):
        theta = self.m * np.log1p(tau)
        lam = self.m * tau / (self.n * (tau + 1.0))
        return self.amplitude * (np.sin(theta) + lam * np.cos(theta)) + self.offset

    def band_halfwidth(self) -> float:
        return self.amplitude * math.sqrt(1.0 + (self.m / self.n) ** 2)


@dataclass(frozen=True)
class LogLogSine(InitialDataExpr):
    """amplitude * sin(log(log(tau + 2))) + offset: extremely slow oscillation."""

    amplitude: float
    offset: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise DomainError(f"amplitude must be positive, got {self.amplitude!r}")
        if not math.isfinite(self.offset):
            raise DomainError(f"offset must be finite, got {self.offset!r}")

    def _values(self, tau):
        return self.amplitude * np.sin(np.log(np.log(tau + 2.0))) + self.offset


@dataclass(frozen=True)
class PeriodicZeroMean(InitialDataExpr):
    """Zero-mean 2 pi periodic trapezoid wave in tau (see TrapezoidWave)."""

    v_max: float
    v_min: float
    ramp_width: float = math.pi / 8.0

    def __post_init__(self):
        self.wave  # validates

    @cached_property
    def wave(self) -> TrapezoidWave:
        return TrapezoidWave(self.v_max, self.v_min, self.ramp_width)

    def _values(self, tau):
        return self.wave.value(tau)


@dataclass(frozen=True)
class BumpTrain(InitialDataExpr):
    """baseline plus disjoint triangular bumps at the centers of a CenterLaw.

    height may be negative (downward bumps).  Disjointness of consecutive
    representable centers is enforced at construction.
    """

    height: float
    half_width: float
    baseline: float
    centers: CenterLaw

    def __post_init__(self):
        if not (math.isfinite(self.height) and self.height != 0):
            raise DomainError(f"height must be finite and nonzero, got {self.height!r}")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise DomainError(f"half_width must be positive, got {self.half_width!r}")
        if not math.isfinite(self.baseline):
            raise DomainError(f"baseline must be finite, got {self.baseline!r}")
        cs = self.centers.representable_centers()
        if cs.size > 1 and not np.all(np.diff(cs) > 2.0 * self.half_width):
            raise DomainError("bump supports overlap: consecutive centers must "
                              f"differ by more than 2 * half_width = {2 * self.half_width}")

    def _values(self, tau):
        cs = self.centers.representable_centers()
        out = np.full_like(tau, self.baseline)
        if cs.size == 0:
            return out
        idx = np.searchsorted(cs, tau)
        j_left = np.clip(idx - 1, 0, cs.size - 1)
        j_right = np.clip(idx, 0, cs.size - 1)
        for j, live in ((j_left, None), (j_right, j_right != j_left)):
            dist = np.abs(tau - cs[j])
            hit = dist < self.half_width
            if live is not None:
                hit = hit & live
            out += self.height * np.maximum(0.0, 1.0 - dist / self.half_width) * hit
        # supports are disjoint so at most one candidate center is within
        # half_width of any point
        return out


@dataclass(frozen=True)
class SlowFromPeriodic(InitialDataExpr):
    """phi(tau) = (tau/n) G'(tau) + G(tau) with G = g(log(tau + 1)).

    By construction the ball average of phi is exactly g(log(tau + 1)), so
    any 2 pi periodic profile g becomes a slow oscillation of the average.
    g must be a TrapezoidWave or TrigPolynomial so G' is exact.  With a
    trapezoid g, phi jumps at the ramp corners (piecewise continuous).
    """

    g: PeriodicFunction
    n: int

    def __post_init__(self):
        if not isinstance(self.g, (TrapezoidWave, TrigPolynomial)):
            raise DomainError("g must be a TrapezoidWave or TrigPolynomial, "
                              f"got {type(self.g).__name__}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")

    def _values(self, tau):
        x = np.log1p(tau)
        return self.g.value(x) + (tau / (self.n * (tau + 1.0))) * self.g.derivative(x)


@dataclass(frozen=True)
class PeriodicOfLog(InitialDataExpr):
    """g(log(tau + 1)) for a 2 pi periodic g: a pure slow oscillation."""

    g: PeriodicFunction

    def __post_init__(self):
        if not isinstance(self.g, (TrapezoidWave, TrigPolynomial)):
            raise DomainError("g must be a TrapezoidWave or TrigPolynomial, "
                              f"got {type(self.g).__name__}")

    def _values(self, tau):
        return self.g.value(np.log1p(tau))


@dataclass(frozen=True)
class Sum(InitialDataExpr):
    terms: tuple[InitialDataExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise DomainError("Sum needs at least one term")
        for t in self.terms:
            if not isinstance(t, InitialDataExpr):
                raise DomainError(f"Sum terms must be expressions, got {t!r}")

    def _values(self, tau):
        out = self.terms[0]._values(tau)
        for t in self.terms[1:]:
            out = out + t._values(tau)
        return out


@dataclass(frozen=True)
class Negate(InitialDataExpr):
    """Pointwise negation; negate(negate(e)) unwraps to e exactly."""

    term: InitialDataExpr

    def __post_init__(self):
        if not isinstance(self.term, InitialDataExpr):
            raise DomainError(f"Negate needs an expression, got {self.term!r}")

    def _values(self, tau):
        return -self.term._values(tau)


def negate(expr: InitialDataExpr) -> InitialDataExpr:
    """Exact pointwise negation, unwrapping double negations."""
    if isinstance(expr, Negate):
        return expr.term
    if isinstance(expr, Constant):
        return Constant(-expr.c)
    if isinstance(expr, Sum):
        return Sum(tuple(negate(t) for t in expr.terms))
    return Negate(expr)


# ---------------------------------------------------------------------------
# Evaluation


def eval_phi(expr: InitialDataExpr, tau):
    """Evaluate phi at tau (scalar or array), tau >= 0 and finite.

    Non-finite tau is rejected with a range error: bands at tau -> infinity
    come from analytic_band_phi, never from evaluating at a fake infinity.
    """
    arr = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise RangeError(
            "tau is not representable; use analytic_band_phi for the "
            "asymptotic band instead of evaluating at infinity")
    if np.any(arr < 0):
        raise DomainError("tau must be nonnegative")
    vals = expr._values(arr if arr.ndim else arr.reshape(1))
    if arr.ndim == 0:
        return float(vals[0])
    return vals


# ---------------------------------------------------------------------------
# Closed-form ball averages


def closed_H(expr: InitialDataExpr, n: int) -> InitialDataExpr | None:
    """Closed-form ball average of expr in dimension n, or None.

    Available exactly when every piece was built as an average preimage:
    LogSineAvgPreimage averages to the matching LogSine, SlowFromPeriodic to
    its periodic profile of log(tau+1), constants to themselves.
    """
    _check_n(n)
    if isinstance(expr, Constant):
        return expr
    if isinstance(expr, LogSineAvgPreimage):
        if expr.n != n:
            return None
        return LogSine(expr.amplitude, expr.m, expr.offset)
    if isinstance(expr, SlowFromPeriodic):
        if expr.n != n:
            return None
        return PeriodicOfLog(expr.g)
    if isinstance(expr, Negate):
        inner = closed_H(expr.term, n)
        return None if inner is None else Negate(inner)
    if isinstance(expr, Sum):
        mapped = [closed_H(t, n) for t in expr.terms]
        if any(m is None for m in mapped):
            return None
        return Sum(tuple(mapped))
    return None


def phi_from_H(h_expr: InitialDataExpr, n: int) -> InitialDataExpr:
    """Initial data whose ball average is exactly h_expr.

    Inverts the averaging identity H'(tau) = (n/tau)(phi - H), i.e.
    phi = H + (tau/n) H'.  Supported H forms: LogSine, Constant,
    PeriodicOfLog, and sums/negations of these.
    """
    _check_n(n)
    if isinstance(h_expr, Constant):
        return h_expr
    if isinstance(h_expr, LogSine):
        return LogSineAvgPreimage(h_expr.amplitude, h_expr.m, h_expr.offset, n)
    if isinstance(h_expr, PeriodicOfLog):
        return SlowFromPeriodic(h_expr.g, n)
    if isinstance(h_expr, Negate):
        return Negate(phi_from_H(h_expr.term, n))
    if isinstance(h_expr, Sum):
        return Sum(tuple(phi_from_H(t, n) for t in h_expr.terms))
    raise UnsupportedExpression(
        f"no average preimage formula for {type(h_expr).__name__}; supported "
        "H forms are LogSine, Constant, PeriodicOfLog, and sums/negations")


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"dimension n must be a positive integer, got {n!r}")


# ---------------------------------------------------------------------------
# Numeric ball average


def numeric_H(expr: InitialDataExpr, n: int, tau: float, tol: float = 1e-8) -> float:
    """Ball average H(tau) = (n/tau^n) int_0^tau phi r^(n-1) dr, H(0) = phi(0).

    Piecewise-linear variants (trapezoid waves, bump trains) integrate
    segment-exactly; adaptive panels would alias their exponentially sparse
    or fine structure.  Smooth variants go through adaptive quadrature on
    the x = log(r+1) axis, where log-periodic oscillation has uniform
    frequency.
    """
    _check_n(n)
    if not (math.isfinite(tau) and tau >= 0):
        raise DomainError(f"tau must be finite and nonnegative, got {tau!r}")
    if not (tol > 0):
        raise DomainError(f"tol must be positive, got {tol!r}")
    if tau == 0.0:
        return eval_phi(expr, 0.0)
    return n * _scaled_radial_integral(expr, n, float(tau), tol)


def _scaled_radial_integral(expr, n, tau, tol):
    """(1/tau^n) int_0^tau phi(r) r^(n-1) dr, dispatched per variant."""
    if isinstance(expr, Constant):
        return expr.c / n
    if isinstance(expr, Negate):
        return -_scaled_radial_integral(expr.term, n, tau, tol)
    if isinstance(expr, Sum):
        return sum(_scaled_radial_integral(t, n, tau, tol) for t in expr.terms)
    if isinstance(expr, PeriodicZeroMean):
        return _periodic_radial_integral(expr.wave.segments(), n, tau)
    if isinstance(expr, BumpTrain):
        return _bump_radial_integral(expr, n, tau)
    return _generic_radial_integral(expr, n, tau, tol)


def _generic_radial_integral(expr, n, tau, tol):
    x_hi = math.log1p(tau)

    def integrand(x):
        r = np.expm1(x)
        u = r / tau
        return expr._values(r) * u ** (n - 1) * (np.exp(x) / tau)

    # cap panels below the oscillation period on the x = log(r+1) axis so a
    # uniform starting grid cannot alias a log-periodic integrand
    freq = _max_log_frequency(expr)
    max_width = (TWO_PI / freq) / 8.0 if freq > 0 else None

    eng_tol = tol / (8.0 * n)
    result = integrate_interval(integrand, 0.0, x_hi, rel_tol=eng_tol,
                                abs_tol=eng_tol, max_panels=400_000,
                                max_width=max_width)
    return result.value


def _max_log_frequency(expr) -> float:
    """Conservative top oscillation frequency of phi on the log(tau+1) axis."""
    if isinstance(expr, (LogSine, LogSineAvgPreimage)):
        return expr.m
    if isinstance(expr, LogLogSine):
        # d/dx log(log(tau+2)) at tau = 0 is 1/log 2, decreasing after
        return 1.0 / math.log(2.0)
    if isinstance(expr, (SlowFromPeriodic, PeriodicOfLog)):
        g = expr.g
        if isinstance(g, TrigPolynomial):
            return float(max(len(g.cos_coeffs), len(g.sin_coeffs), 1))
        return 1.0
    if isinstance(expr, Negate):
        return _max_log_frequency(expr.term)
    if isinstance(expr, Sum):
        return max(_max_log_frequency(t) for t in expr.terms)
    return 0.0


def _periodic_radial_integral(segments, n, tau):
    """Exact (1/tau^n) int_0^tau wave(r) r^(n-1) dr for a piecewise-linear
    2 pi periodic wave given by segments (theta0, theta1, a, b).

    Per full period q: int wave(y) (y + qT)^(n-1) dy expands binomially into
    period moments M_j = int_0^T wave(y) y^j dy, and the powers of q sum in
    closed form (Faulhaber), so the cost is O(n^2) regardless of tau.
    """
    T = TWO_PI
    n_full = math.floor(tau / T)
    rem = tau - n_full * T

    def seg_moment(j, upto):
        tot = 0.0
        for (y0, y1, a, b) in segments:
            if y0 >= upto:
                break
            y2 = min(y1, upto)
            tot += a * (y2 ** (j + 1) - y0 ** (j + 1)) / (j + 1) \
                + b * (y2 ** (j + 2) - y0 ** (j + 2)) / (j + 2)
        return tot

    m_full = [seg_moment(j, T) for j in range(n)]
    m_part = [seg_moment(j, rem) for j in range(n)]

    total = 0.0
    for j in range(n):
        binom = math.comb(n - 1, j)
        if n_full > 0:
            p = n - 1 - j
            total += binom * m_full[j] * T ** p * _faulhaber(p, float(n_full))
        total += binom * m_part[j] * (n_full * T) ** (n - 1 - j)
    return total / tau ** n


def _bump_radial_integral(expr: BumpTrain, n, tau):
    """Exact (1/tau^n) int_0^tau (baseline + bumps)(r) r^(n-1) dr."""
    total = expr.baseline / n
    w = expr.half_width
    for c in expr.centers.representable_centers():
        if c - w >= tau:
            break
        s_lo = max(-w, -c)
        s_hi = min(w, tau - c)
        if s_hi <= s_lo:
            continue
        # int (1 - |s|/w) (c + s)^(n-1) ds, expanded in powers of s/tau
        contrib = 0.0
        for i in range(n):
            piece = _triangle_power_moment(i, s_lo, s_hi, w)
            contrib += math.comb(n - 1, i) * (c / tau) ** (n - 1 - i) \
                * piece / tau ** (i + 1)
        total += expr.height * contrib
    return total


def _triangle_power_moment(i, s_lo, s_hi, w):
    """int_{s_lo}^{s_hi} (1 - |s|/w) s^i ds, exact."""

    def upper(s):  # antiderivative of (1 - s/w) s^i for s >= 0
        return s ** (i + 1) / (i + 1) - s ** (i + 2) / ((i + 2) * w)

    def lower(s):  # antiderivative of (1 + s/w) s^i for s <= 0
        return s ** (i + 1) / (i + 1) + s ** (i + 2) / ((i + 2) * w)

    total = 0.0
    if s_lo < 0:
        hi = min(s_hi, 0.0)
        total += lower(hi) - lower(s_lo)
    if s_hi > 0:
        lo = max(s_lo, 0.0)
        total += upper(s_hi) - upper(lo)
    return total


# ---------------------------------------------------------------------------
# Analytic bands


def analytic_band_phi(expr: InitialDataExpr) -> tuple[float, float]:
    """Exact (liminf, limsup) of phi as tau -> infinity.

    Sums are supported when the slow content is either a single term or a
    set of integer-frequency log sines (whose joint asymptotic profile is a
    trig polynomial); 2 pi periodic waves and sparse bump trains contribute
    their own extremes on top because their phases decouple from the slow
    phase.
    """
    lo, hi = _band(expr)
    return (lo, hi)


def _band(expr) -> tuple[float, float]:
    if isinstance(expr, Constant):
        return (expr.c, expr.c)
    if isinstance(expr, LogSine):
        return (expr.offset - expr.amplitude, expr.offset + expr.amplitude)
    if isinstance(expr, LogSineAvgPreimage):
        h = expr.band_halfwidth()
        return (expr.offset - h, expr.offset + h)
    if isinstance(expr, LogLogSine):
        return (expr.offset - expr.amplitude, expr.offset + expr.amplitude)
    if isinstance(expr, PeriodicZeroMean):
        return (expr.v_min, expr.v_max)
    if isinstance(expr, PeriodicOfLog):
        return expr.g.extrema()
    if isinstance(expr, SlowFromPeriodic):
        return _slow_band(expr)
    if isinstance(expr, BumpTrain):
        return (expr.baseline + min(expr.height, 0.0),
                expr.baseline + max(expr.height, 0.0))
    if isinstance(expr, Negate):
        lo, hi = _band(expr.term)
        return (-hi, -lo)
    if isinstance(expr, Sum):
        return _sum_band(expr)
    raise UnsupportedExpression(f"no band rule for {type(expr).__name__}")


def _slow_band(expr: SlowFromPeriodic) -> tuple[float, float]:
    g = expr.g
    if isinstance(g, TrigPolynomial):
        dp = g.derivative_poly()
        j_max = max(len(g.cos_coeffs), len(g.sin_coeffs), 1)
        cos = [0.0] * j_max
        sin = [0.0] * j_max
        for j in range(1, j_max + 1):
            gc = g.cos_coeffs[j - 1] if j <= len(g.cos_coeffs) else 0.0
            gs = g.sin_coeffs[j - 1] if j <= len(g.sin_coeffs) else 0.0
            dc = dp.cos_coeffs[j - 1] if j <= len(dp.cos_coeffs) else 0.0
            ds = dp.sin_coeffs[j - 1] if j <= len(dp.sin_coeffs) else 0.0
            cos[j - 1] = gc + dc / expr.n
            sin[j - 1] = gs + ds / expr.n
        return TrigPolynomial(g.const, tuple(cos), tuple(sin)).extrema()
    # trapezoid: g + g'/n is linear on each open segment; extremes sit at
    # (one-sided limits of) segment endpoints
    vals = []
    for (t0, t1, a, b) in g.segments():
        vals.append(a + b * t0 + b / expr.n)
        vals.append(a + b * t1 + b / expr.n)
    return (min(vals), max(vals))


_SLOW_TYPES = (LogSine, LogSineAvgPreimage, LogLogSine, SlowFromPeriodic,
               PeriodicOfLog)


def _sum_band(expr: Sum) -> tuple[float, float]:
    const = 0.0
    trap_lo = trap_hi = 0.0
    bump_lo = bump_hi = 0.0
    slows = []
    for t in _flatten(expr):
        neg = False
        if isinstance(t, Negate):
            t, neg = t.term, True
        if isinstance(t, Constant):
            const += -t.c if neg else t.c
        elif isinstance(t, PeriodicZeroMean):
            lo, hi = (-t.v_max, -t.v_min) if neg else (t.v_min, t.v_max)
            trap_lo += lo
            trap_hi += hi
        elif isinstance(t, BumpTrain):
            h = -t.height if neg else t.height
            const += -t.baseline if neg else t.baseline
            bump_lo += min(h, 0.0)
            bump_hi += max(h, 0.0)
        elif isinstance(t, _SLOW_TYPES):
            slows.append((t, neg))
        else:
            raise UnsupportedExpression(
                f"no band rule for Sum containing {type(t).__name__}")

    if len(slows) == 0:
        s_lo = s_hi = 0.0
    elif len(slows) == 1:
        t, neg = slows[0]
        lo, hi = _band(t)
        s_lo, s_hi = (-hi, -lo) if neg else (lo, hi)
    else:
        s_lo, s_hi = _commensurate_band(slows)

    return (const + s_lo + trap_lo + bump_lo, const + s_hi + trap_hi + bump_hi)


def _flatten(expr: Sum):
    for t in expr.terms:
        if isinstance(t, Sum):
            yield from _flatten(t)
        else:
            yield t


def _commensurate_band(slows) -> tuple[float, float]:
    """Joint band of several log sines sharing integer frequencies.

    Their phases are all m_i log(tau+1), so the asymptotic profile is the
    trig polynomial sum_i a_i [sin(m_i x) + (m_i/n_i) cos(m_i x)] and the
    band is its range over one period.
    """
    poly = _commensurate_profile(slows)
    if poly is None:
        raise UnsupportedExpression(
            "band of a multi-mode sum needs every slow term to be a log sine "
            "with integer frequency; mixed or incommensurate slow terms have "
            "no product-form band")
    return poly.extrema()


def _commensurate_profile(slows) -> TrigPolynomial | None:
    const = 0.0
    cos: dict[int, float] = {}
    sin: dict[int, float] = {}
    for t, negd in slows:
        sign = -1.0 if negd else 1.0
        if isinstance(t, LogSine):
            j = _as_integer(t.m)
            if j is None:
                return None
            sin[j] = sin.get(j, 0.0) + sign * t.amplitude
            const += sign * t.offset
        elif isinstance(t, LogSineAvgPreimage):
            j = _as_integer(t.m)
            if j is None:
                return None
            sin[j] = sin.get(j, 0.0) + sign * t.amplitude
            cos[j] = cos.get(j, 0.0) + sign * t.amplitude * t.m / t.n
            const += sign * t.offset
        else:
            return None
    j_max = max(list(cos) + list(sin))
    return TrigPolynomial(
        const,
        tuple(cos.get(j, 0.0) for j in range(1, j_max + 1)),
        tuple(sin.get(j, 0.0) for j in range(1, j_max + 1)),
    )


def _as_integer(m: float) -> int | None:
    j = round(m)
    if j >= 1 and abs(m - j) <= 1e-12 * max(1.0, abs(m)):
        return int(j)
    return None


def sup_abs_phi(expr: InitialDataExpr) -> float:
    """Upper bound for sup |phi| over all of [0, infinity).

    Exact for atomic variants; subadditive (so possibly loose) for sums.
    This is the M in the maximum principle |u| <= M.
    """
    if isinstance(expr, Constant):
        return abs(expr.c)
    if isinstance(expr, LogSine):
        return abs(expr.offset) + expr.amplitude
    if isinstance(expr, LogSineAvgPreimage):
        return abs(expr.offset) + expr.band_halfwidth()
    if isinstance(expr, LogLogSine):
        return abs(expr.offset) + expr.amplitude
    if isinstance(expr, PeriodicZeroMean):
        return max(expr.v_max, -expr.v_min)
    if isinstance(expr, PeriodicOfLog):
        lo, hi = expr.g.extrema()
        return max(abs(lo), abs(hi))
    if isinstance(expr, SlowFromPeriodic):
        g = expr.g
        if isinstance(g, TrigPolynomial):
            return g.abs_max() + g.derivative_poly().abs_max() / expr.n
        slopes = [abs(b) for (_t0, _t1, _a, b) in g.segments()]
        return max(g.v_max, -g.v_min) + max(slopes) / expr.n
    if isinstance(expr, BumpTrain):
        return max(abs(expr.baseline), abs(expr.baseline + expr.height))
    if isinstance(expr, Negate):
        return sup_abs_phi(expr.term)
    if isinstance(expr, Sum):
        return sum(sup_abs_phi(t) for t in expr.terms)
    raise UnsupportedExpression(f"no sup bound for {type(expr).__name__}")


# ---------------------------------------------------------------------------
# Band witnesses: tau values where phi provably comes within o(1) of its band


def band_witnesses(expr: InitialDataExpr, tau_lo: float = 1e3,
                   tau_hi: float = 1e12) -> tuple[np.ndarray, np.ndarray]:
    """(tau values approaching liminf, tau values approaching limsup).

    These are the analytic extremizer locations: exact phase solutions for
    the slow terms, plateau centers for periodic waves (aligned inside the
    slow term's long extremal stretches when both occur), bump centers and
    gap midpoints for trains.  Values are clipped to representable range.
    """
    lo_w, hi_w = _witnesses(expr, tau_lo, tau_hi)
    lo = np.asarray(sorted(set(float(t) for t in lo_w if 0 <= t < _FLOAT_MAX)))
    hi = np.asarray(sorted(set(float(t) for t in hi_w if 0 <= t < _FLOAT_MAX)))
    return lo, hi


def _phase_taus(m, phase, tau_lo, tau_hi):
    """tau = exp((phase + 2 k pi)/m) - 1 inside [tau_lo, tau_hi]."""
    x_lo = math.log1p(tau_lo) * m
    x_hi = math.log1p(min(tau_hi, _FLOAT_MAX / 4)) * m
    k_lo = math.ceil((x_lo - phase) / TWO_PI)
    k_hi = math.floor((x_hi - phase) / TWO_PI)
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    if ks.size > 64:
        ks = ks[np.linspace(0, ks.size - 1, 64).astype(int)]
    return np.expm1((phase + TWO_PI * ks) / m)


def _witnesses(expr, tau_lo, tau_hi):
    if isinstance(expr, Constant):
        mid = 0.5 * (tau_lo + tau_hi)
        return [mid], [mid]
    if isinstance(expr, LogSine):
        return (_phase_taus(expr.m, 1.5 * math.pi, tau_lo, tau_hi),
                _phase_taus(expr.m, 0.5 * math.pi, tau_lo, tau_hi))
    if isinstance(expr, LogSineAvgPreimage):
        # asymptotic extremal phase of sin th + (m/n) cos th
        lam = expr.m / expr.n
        th = math.atan2(1.0, lam)
        return (_phase_taus(expr.m, th + math.pi, tau_lo, tau_hi),
                _phase_taus(expr.m, th, tau_lo, tau_hi))
    if isinstance(expr, LogLogSine):
        # only the first peak/trough of each parity fits in a double
        peaks = DoubleExpCenters("peak").representable_centers()
        troughs = DoubleExpCenters("trough").representable_centers()
        return list(troughs), list(peaks)
    if isinstance(expr, PeriodicZeroMean):
        arg_lo, arg_hi = expr.wave.extremizer_args()
        base = TWO_PI * np.arange(math.ceil(tau_lo / TWO_PI),
                                  math.ceil(tau_lo / TWO_PI) + 40)
        return list(base + arg_lo), list(base + arg_hi)
    if isinstance(expr, SlowFromPeriodic):
        return _slow_witnesses(expr, tau_lo, tau_hi)
    if isinstance(expr, PeriodicOfLog):
        g = expr.g
        if isinstance(g, TrigPolynomial):
            (_lo, _hi), (a_lo, a_hi) = g.extrema_with_args()
        else:
            a_lo, a_hi = g.extremizer_args()
        return (_phase_taus(1.0, a_lo, tau_lo, tau_hi),
                _phase_taus(1.0, a_hi, tau_lo, tau_hi))
    if isinstance(expr, BumpTrain):
        cs = expr.centers.representable_centers()
        cs = cs[(cs >= tau_lo) & (cs <= tau_hi)]
        if cs.size == 0:
            cs = expr.centers.representable_centers()[-1:]
        gaps = np.sqrt(cs[:-1] * cs[1:]) if cs.size > 1 else cs * 7.0
        at_bumps, away = list(cs), list(gaps)
        if expr.height > 0:
            return away, at_bumps
        return at_bumps, away
    if isinstance(expr, Negate):
        lo_w, hi_w = _witnesses(expr.term, tau_lo, tau_hi)
        return hi_w, lo_w
    if isinstance(expr, Sum):
        return _sum_witnesses(expr, tau_lo, tau_hi)
    raise UnsupportedExpression(f"no witnesses for {type(expr).__name__}")


def _slow_witnesses(expr: SlowFromPeriodic, tau_lo, tau_hi):
    g = expr.g
    if isinstance(g, TrigPolynomial):
        dp = g.derivative_poly()
        j_max = max(len(g.cos_coeffs), len(g.sin_coeffs), 1)
        cos = list(dp.cos_coeffs) + [0.0] * (j_max - len(dp.cos_coeffs))
        sin = list(dp.sin_coeffs) + [0.0] * (j_max - len(dp.sin_coeffs))
        h = TrigPolynomial(
            g.const,
            tuple((g.cos_coeffs[j] if j < len(g.cos_coeffs) else 0.0) + cos[j] / expr.n
                  for j in range(j_max)),
            tuple((g.sin_coeffs[j] if j < len(g.sin_coeffs) else 0.0) + sin[j] / expr.n
                  for j in range(j_max)),
        )
        (_lo, _hi), (a_lo, a_hi) = h.extrema_with_args()
        return (_phase_taus(1.0, a_lo, tau_lo, tau_hi),
                _phase_taus(1.0, a_hi, tau_lo, tau_hi))
    # trapezoid: g + g'/n is linear per segment, so its extremes sit at
    # one-sided segment endpoints; nudge inward so evaluation picks the
    # correct piece (the corner value itself belongs to the neighbor)
    nudge = 1e-9
    best_lo = best_hi = None
    a_lo = a_hi = 0.0
    for (t0, t1, a, b) in g.segments():
        for th in (t0 + nudge, t1 - nudge):
            h = a + b * th + b / expr.n
            if best_lo is None or h < best_lo:
                best_lo, a_lo = h, th
            if best_hi is None or h > best_hi:
                best_hi, a_hi = h, th
    return (_phase_taus(1.0, a_lo, tau_lo, tau_hi),
            _phase_taus(1.0, a_hi, tau_lo, tau_hi))


def _sum_witnesses(expr: Sum, tau_lo, tau_hi):
    terms = list(_flatten(expr))
    slows = []
    waves = []
    bumps = []
    for t in terms:
        base = t.term if isinstance(t, Negate) else t
        negd = isinstance(t, Negate)
        if isinstance(base, _SLOW_TYPES):
            slows.append((base, negd))
        elif isinstance(base, PeriodicZeroMean):
            waves.append((base, negd))
        elif isinstance(base, BumpTrain):
            bumps.append((base, negd))

    if len(slows) > 1:
        poly = _commensurate_profile(slows)
        if poly is None:
            raise UnsupportedExpression("witnesses need commensurate slow terms")
        (_l, _h), (a_lo, a_hi) = poly.extrema_with_args()
        lo_w = _phase_taus(1.0, a_lo, tau_lo, tau_hi)
        hi_w = _phase_taus(1.0, a_hi, tau_lo, tau_hi)
    elif len(slows) == 1:
        base, negd = slows[0]
        lo_w, hi_w = _witnesses(Negate(base) if negd else base, tau_lo, tau_hi)
    else:
        lo_w = hi_w = np.asarray([0.5 * (tau_lo + tau_hi)])

    # align each slow witness with the periodic wave's extremal plateau: the
    # slow phase is frozen over a shift of at most 2 pi in tau
    for (w, negd) in waves:
        arg_lo, arg_hi = w.wave.extremizer_args()
        if negd:
            arg_lo, arg_hi = arg_hi, arg_lo
        lo_w = _align_phase(np.asarray(lo_w, dtype=float), arg_lo)
        hi_w = _align_phase(np.asarray(hi_w, dtype=float), arg_hi)

    # bump trains: limsup needs a bump center, which the double-exponential
    # law places exactly at the slow term's peaks
    for (b, negd) in bumps:
        height = -b.height if negd else b.height
        cs = b.centers.representable_centers()
        if height > 0:
            hi_w = np.concatenate([np.asarray(hi_w, float), cs])
        else:
            lo_w = np.concatenate([np.asarray(lo_w, float), cs])

    return list(np.asarray(lo_w, float)), list(np.asarray(hi_w, float))


def _align_phase(taus: np.ndarray, target_arg: float) -> np.ndarray:
    """Shift each tau forward (< 2 pi) so tau mod 2 pi equals target_arg."""
    shift = np.mod(target_arg - np.mod(taus, TWO_PI), TWO_PI)
    return taus + shift


# ---------------------------------------------------------------------------
# Serialization (schema idexpr/1)


def to_json(expr: InitialDataExpr) -> dict:
    return {"schema": SCHEMA_ID, "expr": _node_to_doc(expr)}


def from_json(doc: dict) -> InitialDataExpr:
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_ID:
        raise DomainError(f"expected schema {SCHEMA_ID!r}, got {doc.get('schema')!r}")
    return _node_from_doc(doc["expr"])


def dumps(expr: InitialDataExpr) -> str:
    return json.dumps(to_json(expr), sort_keys=True)


def loads(text: str) -> InitialDataExpr:
    return from_json(json.loads(text))


def _periodic_to_doc(g: PeriodicFunction) -> dict:
    if isinstance(g, TrapezoidWave):
        return {"kind": "trapezoid", "v_max": g.v_max, "v_min": g.v_min,
                "ramp_width": g.ramp_width}
    if isinstance(g, TrigPolynomial):
        return {"kind": "trig_poly", "const": g.const,
                "cos": list(g.cos_coeffs), "sin": list(g.sin_coeffs)}
    raise DomainError(f"unserializable periodic function {type(g).__name__}")


def _periodic_from_doc(doc: dict) -> PeriodicFunction:
    kind = doc.get("kind")
    if kind == "trapezoid":
        return TrapezoidWave(doc["v_max"], doc["v_min"], doc["ramp_width"])
    if kind == "trig_poly":
        return TrigPolynomial(doc["const"], tuple(doc["cos"]), tuple(doc["sin"]))
    raise DomainError(f"unknown periodic function kind {kind!r}")


def _centers_to_doc(law: CenterLaw) -> dict:
    if isinstance(law, GeometricCenters):
        return {"law": "geometric", "base": law.base}
    if isinstance(law, DoubleExpCenters):
        return {"law": "double_exp", "parity": law.parity}
    raise DomainError(f"unserializable center law {type(law).__name__}")


def _centers_from_doc(doc: dict) -> CenterLaw:
    law = doc.get("law")
    if law == "geometric":
        return GeometricCenters(doc["base"])
    if law == "double_exp":
        return DoubleExpCenters(doc["parity"])
    raise DomainError(f"unknown center law {law!r}")


def _node_to_doc(expr: InitialDataExpr) -> dict:
    if isinstance(expr, Constant):
        return {"variant": "constant", "c": expr.c}
    if isinstance(expr, LogSine):
        return {"variant": "log_sine", "amplitude": expr.amplitude,
                "m": expr.m, "offset": expr.offset}
    if isinstance(expr, LogSineAvgPreimage):
        return {"variant": "log_sine_avg_preimage", "amplitude": expr.amplitude,
                "m": expr.m, "offset": expr.offset, "n": expr.n}
    if isinstance(expr, LogLogSine):
        return {"variant": "log_log_sine", "amplitude": expr.amplitude,
                "offset": expr.offset}
    if isinstance(expr, PeriodicZeroMean):
        return {"variant": "periodic_zero_mean", "v_max": expr.v_max,
                "v_min": expr.v_min, "ramp_width": expr.ramp_width}
    if isinstance(expr, BumpTrain):
        return {"variant": "bump_train", "height": expr.height,
                "half_width": expr.half_width, "baseline": expr.baseline,
                "centers": _centers_to_doc(expr.centers)}
    if isinstance(expr, SlowFromPeriodic):
        return {"variant": "slow_from_periodic", "g": _periodic_to_doc(expr.g),
                "n": expr.n}
    if isinstance(expr, PeriodicOfLog):
        return {"variant": "periodic_of_log", "g": _periodic_to_doc(expr.g)}
    if isinstance(expr, Sum):
        return {"variant": "sum", "terms": [_node_to_doc(t) for t in expr.terms]}
    if isinstance(expr, Negate):
        return {"variant": "negate", "term": _node_to_doc(expr.term)}
    raise DomainError(f"unserializable expression {type(expr).__name__}")


def _node_from_doc(doc: dict) -> InitialDataExpr:
    if not isinstance(doc, dict):
        raise DomainError(f"expression node must be an object, got {doc!r}")
    v = doc.get("variant")
    if v == "constant":
        return Constant(doc["c"])
    if v == "log_sine":
        return LogSine(doc["amplitude"], doc["m"], doc["offset"])
    if v == "log_sine_avg_preimage":
        return LogSineAvgPreimage(doc["amplitude"], doc["m"], doc["offset"],
                                  int(doc["n"]))
    if v == "log_log_sine":
        return LogLogSine(doc["amplitude"], doc["offset"])
    if v == "periodic_zero_mean":
        return PeriodicZeroMean(doc["v_max"], doc["v_min"], doc["ramp_width"])
    if v == "bump_train":
        return BumpTrain(doc["height"], doc["half_width"], doc["baseline"],
                         _centers_from_doc(doc["centers"]))
    if v == "slow_from_periodic":
        return SlowFromPeriodic(_periodic_from_doc(doc["g"]), int(doc["n"]))
    if v == "periodic_of_log":
        return PeriodicOfLog(_periodic_from_doc(doc["g"]))
    if v == "sum":
        return Sum(tuple(_node_from_doc(t) for t in doc["terms"]))
    if v == "negate":
        return Negate(_node_from_doc(doc["term"]))
    raise DomainError(f"unknown expression variant {v!r}")

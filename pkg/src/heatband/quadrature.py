"""Adaptive quadrature for Gaussian-weighted and log-axis oscillatory integrals.

Two entry points:

  integrate_weighted(f, k, spec)        ~  int_0^inf exp(-z^2) z^k f(z) dz
  integrate_log_oscillatory(F, m, trig, spec)
                                        ~  int_{x_min}^{log z_max} F(x) trig(m x) dx

Both run the same batched adaptive Simpson core with per-panel Richardson
error estimates.  Integrands that oscillate without bound as z -> 0+ must go
through the log-axis entry point; the panel width cap there guarantees at
least 8 panels per oscillation period.  The semi-infinite tail beyond z_max
is bounded analytically, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, EvaluationError

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "integrate_weighted",
    "integrate_log_oscillatory",
    "integrate_interval",
    "gaussian_power_tail",
    "PANELS_PER_PERIOD",
    "MAX_OSCILLATION_FREQUENCY",
]

# Oscillatory panels are never wider than (period / PANELS_PER_PERIOD).
PANELS_PER_PERIOD = 8

# Frequencies above this are refused outright.  Riemann-Lebesgue decay makes
# the integral indistinguishable from zero in double precision long before
# m = 500, while the panel cap would keep burning panels linearly in m.
MAX_OSCILLATION_FREQUENCY = 500.0

# Left endpoint stand-in for the open interval (0, z_max]: integrands such as
# cos(m log z) are undefined at exactly 0 but fine at any positive double.
_LEFT_EDGE = 1e-300


@dataclass(frozen=True)
class QuadratureSpec:
    """Error targets and truncation window for the adaptive engine.

    x_min defaults to -40 so that every amplitude exp((k+1) x) supported by
    the kernel-moment integrals (k >= 0) is below 1e-17 at the cut; use
    for_power to tighten the window for a known weight power.
    """

    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    z_max: float = 12.0
    x_min: float = -40.0
    max_panels: int = 200_000

    def __post_init__(self):
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not (math.isfinite(self.z_max) and self.z_max > 1):
            raise DomainError(f"z_max must exceed 1, got {self.z_max}")
        if not (math.isfinite(self.x_min) and self.x_min < 0):
            raise DomainError(f"x_min must be negative, got {self.x_min}")
        if self.max_panels < 16:
            raise DomainError(f"max_panels must be at least 16, got {self.max_panels}")

    @classmethod
    def for_power(cls, power: int, **overrides) -> "QuadratureSpec":
        """Spec with x_min scaled so exp((power+1) x_min) < 1e-17.

        power is the z exponent of the weighted integrand; the log-axis
        amplitude decays like exp((power+1) x) as x -> -inf.
        """
        if power < 0:
            raise DomainError(f"power must be >= 0, got {power}")
        overrides.setdefault("x_min", -40.0 / (power + 1))
        return cls(**overrides)


@dataclass(frozen=True)
class IntegralResult:
    """Value, conservative absolute error estimate, and evaluation count."""

    value: float
    abs_error_est: float
    evaluations: int

    def __post_init__(self):
        if not (self.abs_error_est >= 0):
            raise DomainError("abs_error_est must be nonnegative")
        if self.evaluations < 1:
            raise DomainError("evaluations must be at least 1")


def gaussian_power_tail(k: int, z_cut: float) -> float:
    """Exact value of int_{z_cut}^inf z^k exp(-z^2) dz for integer k >= 0.

    Upward recurrence G(k) = ((k-1)/2) G(k-2) + z_cut^(k-1) exp(-z_cut^2)/2,
    all terms positive, so it is stable.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    e = math.exp(-z_cut * z_cut)
    g_even = 0.5 * math.sqrt(math.pi) * math.erfc(z_cut)  # G(0)
    g_odd = 0.5 * e                                        # G(1)
    if k == 0:
        return g_even
    if k == 1:
        return g_odd
    g_prev, parity = (g_even, 0) if k % 2 == 0 else (g_odd, 1)
    g = g_prev
    for j in range(parity + 2, k + 1, 2):
        g = 0.5 * (j - 1) * g_prev + 0.5 * z_cut ** (j - 1) * e
        g_prev = g
    return g


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _checked_eval(g: Callable, x: np.ndarray, counter: _Counter) -> np.ndarray:
    vals = np.asarray(g(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape).astype(float)
    counter.n += x.size
    if not np.all(np.isfinite(vals)):
        bad = float(x[~np.isfinite(vals)].flat[0])
        raise EvaluationError(
            f"integrand returned a non-finite value at point {bad!r}", point=bad)
    return vals


def _adaptive_simpson(g: Callable, a: float, b: float, *, rel_tol: float,
                      abs_tol: float, max_panels: int,
                      max_width: float | None = None) -> tuple[float, float, int]:
    """Batched adaptive Simpson with Richardson acceptance on [a, b].

    Relative tolerance is applied against an L1 estimate of the integrand so
    that oscillatory cancellation does not force unbounded refinement.
    Returns (value, error_estimate, evaluations).
    """
    if not b > a:
        raise DomainError(f"empty integration interval [{a}, {b}]")
    span = b - a
    counter = _Counter()

    n0 = 16
    if max_width is not None and span / n0 > max_width:
        n0 = int(math.ceil(span / max_width))
    if n0 > max_panels:
        raise ConvergenceError(
            f"initial grid needs {n0} panels, exceeding max_panels={max_panels}")

    edges = np.linspace(a, b, n0 + 1)
    lefts = edges[:-1].copy()
    widths = np.diff(edges)
    # 5-point stencil per panel: endpoints, midpoint, quarter points.
    stencil = lefts[:, None] + widths[:, None] * np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    f = _checked_eval(g, stencil.ravel(), counter).reshape(n0, 5)

    value = 0.0
    err_total = 0.0
    panels_processed = n0
    tol = None

    while lefts.size:
        h = widths
        s1 = h / 6.0 * (f[:, 0] + 4.0 * f[:, 2] + f[:, 4])
        s2 = h / 12.0 * (f[:, 0] + 4.0 * f[:, 1] + 2.0 * f[:, 2]
                         + 4.0 * f[:, 3] + f[:, 4])
        err = (s2 - s1) / 15.0
        if tol is None:
            l1 = float(np.sum(h / 12.0 * (np.abs(f[:, 0]) + 4.0 * np.abs(f[:, 1])
                                          + 2.0 * np.abs(f[:, 2])
                                          + 4.0 * np.abs(f[:, 3])
                                          + np.abs(f[:, 4]))))
            tol = max(abs_tol, rel_tol * l1)

        unsplittable = (lefts + 0.25 * h) <= lefts
        accept = (np.abs(err) <= tol * (h / span)) | unsplittable
        value += float(np.sum(s2[accept] + err[accept]))
        err_total += float(np.sum(np.abs(err[accept])))

        reject = ~accept
        if not reject.any():
            break
        n_children = 2 * int(reject.sum())
        if panels_processed + n_children > max_panels:
            best = value + float(np.sum(s2[reject] + err[reject]))
            est = err_total + float(np.sum(np.abs(err[reject])))
            raise ConvergenceError(
                f"panel budget {max_panels} exhausted before reaching tolerance",
                best_value=best, error_estimate=est)
        panels_processed += n_children

        rl, rh, rf = lefts[reject], h[reject], f[reject]
        # children reuse the parent's endpoint/quarter/mid values
        new_pts = rl[:, None] + rh[:, None] * np.array([0.125, 0.375, 0.625, 0.875])
        nf = _checked_eval(g, new_pts.ravel(), counter).reshape(-1, 4)
        half = 0.5 * rh
        lefts = np.concatenate([rl, rl + half])
        widths = np.concatenate([half, half])
        f_lo = np.column_stack([rf[:, 0], nf[:, 0], rf[:, 1], nf[:, 1], rf[:, 2]])
        f_hi = np.column_stack([rf[:, 2], nf[:, 2], rf[:, 3], nf[:, 3], rf[:, 4]])
        f = np.vstack([f_lo, f_hi])

    return value, err_total, counter.n


def integrate_weighted(f: Callable, k: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate exp(-z^2) z^k f(z) over (0, inf).

    f must be bounded on (0, z_max] and is called with numpy arrays of
    positive points (never exactly 0).  The semi-infinite tail beyond z_max
    is bounded by max|f| over the sampled points times the exact Gaussian
    power tail; with the default z_max = 12 that bound sits around 1e-52.

    f may oscillate only where the weight damps it; integrands oscillating
    without bound as z -> 0+ at k = 0 belong on the log axis instead.
    """
    if spec is None:
        spec = QuadratureSpec()
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"weight power k must be a nonnegative integer, got {k!r}")

    f_max = _Counter()  # reuse as a float box
    f_max.n = 0.0

    def integrand(z):
        fv = np.asarray(f(z), dtype=float)
        if fv.shape != z.shape:
            fv = np.broadcast_to(fv, z.shape).astype(float)
        if not np.all(np.isfinite(fv)):
            bad = float(z[~np.isfinite(fv)].flat[0])
            raise EvaluationError(
                f"f returned a non-finite value at z = {bad!r}", point=bad)
        m = float(np.max(np.abs(fv))) if fv.size else 0.0
        if m > f_max.n:
            f_max.n = m
        return np.exp(-z * z) * z ** k * fv

    value, err, evals = _adaptive_simpson(
        integrand, _LEFT_EDGE, spec.z_max, rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol, max_panels=spec.max_panels)
    tail = f_max.n * gaussian_power_tail(k, spec.z_max)
    left_edge = f_max.n * _LEFT_EDGE ** (k + 1) / (k + 1)
    return IntegralResult(value, err + tail + left_edge, evals)


def integrate_log_oscillatory(F: Callable, m: float, trig,
                              spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate F(x) trig(m x) over [x_min, log z_max] on the log axis.

    This is the substitution x = log z applied to a weighted oscillatory
    integral: the infinitely many oscillations of trig(m log z) near z = 0
    become the uniform frequency m in x, and panels are capped at 1/8 of the
    period 2 pi / m.  F must decay fast enough that both tails beyond the
    window are below abs_tol (true for the kernel amplitudes, which die like
    exp((power+1) x) on the left and exp(-e^{2x}) on the right).
    """
    if spec is None:
        spec = QuadratureSpec()
    if not (math.isfinite(m) and m > 0):
        raise DomainError(f"oscillation frequency m must be positive, got {m!r}")
    if m > MAX_OSCILLATION_FREQUENCY:
        raise ConvergenceError(
            f"m = {m} exceeds the refusal threshold {MAX_OSCILLATION_FREQUENCY}; "
            "the result would be below double-precision noise while the panel "
            "cap forces an unbounded grid")
    trig_fn = _normalize_trig(trig)
    x_hi = math.log(spec.z_max)
    if spec.x_min >= x_hi:
        raise DomainError(f"x_min = {spec.x_min} must lie below log z_max = {x_hi}")

    counter_box = _Counter()
    counter_box.n = 0.0

    def integrand(x):
        fv = np.asarray(F(x), dtype=float)
        if fv.shape != x.shape:
            fv = np.broadcast_to(fv, x.shape).astype(float)
        if not np.all(np.isfinite(fv)):
            bad = float(x[~np.isfinite(fv)].flat[0])
            raise EvaluationError(
                f"F returned a non-finite value at x = {bad!r}", point=bad)
        return fv * trig_fn(m * x)

    cap = (2.0 * math.pi / m) / PANELS_PER_PERIOD
    value, err, evals = _adaptive_simpson(
        integrand, spec.x_min, x_hi, rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol, max_panels=spec.max_panels, max_width=cap)
    # the precondition grants that both unseen tails are below abs_tol
    return IntegralResult(value, err + spec.abs_tol, evals)


def _normalize_trig(trig):
    if trig is np.cos or trig is math.cos or trig == "cos":
        return np.cos
    if trig is np.sin or trig is math.sin or trig == "sin":
        return np.sin
    raise DomainError(f"trig must be 'cos' or 'sin', got {trig!r}")


def integrate_interval(f: Callable, a: float, b: float, *,
                       rel_tol: float = 1e-11, abs_tol: float = 1e-13,
                       max_panels: int = 200_000,
                       max_width: float | None = None) -> IntegralResult:
    """Adaptive integral of a vectorized f over the finite interval [a, b].

    Same engine as the weighted entry points, exposed for finite-range work
    such as ball averages.  f receives a float array and must return one of
    the same shape.
    """

    def integrand(x):
        fv = np.asarray(f(x), dtype=float)
        if fv.shape != x.shape:
            fv = np.broadcast_to(fv, x.shape).astype(float)
        if not np.all(np.isfinite(fv)):
            bad = float(x[~np.isfinite(fv)].flat[0])
            raise EvaluationError(
                f"f returned a non-finite value at x = {bad!r}", point=bad)
        return fv

    value, err, evals = _adaptive_simpson(
        integrand, a, b, rel_tol=rel_tol, abs_tol=abs_tol,
        max_panels=max_panels, max_width=max_width)
    return IntegralResult(value, err, evals)

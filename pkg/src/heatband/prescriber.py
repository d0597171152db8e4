"""Turn band prescriptions into concrete initial data with certificates.

Two prescription families:

  * average-side: given p < u_lo < u_hi < q with p + q = u_lo + u_hi, build
    data whose ball average oscillates exactly between (p, q) and whose
    origin solution oscillates between (u_lo, u_hi);
  * data-side: given r <= u_lo <= u_hi <= s, build data oscillating between
    (r, s) with origin solution oscillating between (u_lo, u_hi), covering
    every ordering/equality pattern via a construction dispatch.

Each construction returns a PrescriptionCertificate carrying the expression,
the analytic bands it guarantees, and a tag naming the construction; numeric
verification of certificates lives in solution_probe, deliberately separate
from construction.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedExpression
from .initial_data import (
    BumpTrain,
    Constant,
    DoubleExpCenters,
    GeometricCenters,
    InitialDataExpr,
    LogLogSine,
    LogSine,
    LogSineAvgPreimage,
    Negate,
    PeriodicZeroMean,
    Sum,
    TrigPolynomial,
    analytic_band_phi,
    from_json as expr_from_json,
    negate,
    phi_from_H,
    to_json as expr_to_json,
)
from .kernel_moments import KernelFlavor, kernel_moments, solve_m
from .quadrature import QuadratureSpec

__all__ = [
    "AverageQuad",
    "DataQuad",
    "PrescriptionTarget",
    "PrescriptionCertificate",
    "prescribe_average",
    "prescribe_data",
    "lemma_not_example",
    "envelope_u",
    "balanced_ramp_width",
    "cert_to_json",
    "cert_from_json",
    "cert_dumps",
    "cert_loads",
    "CERT_SCHEMA_ID",
]

CERT_SCHEMA_ID = "cert/1"

# equality of prescribed values is decided at this relative scale
_EQ_TOL = 1e-12

TWO_PI = 2.0 * math.pi


def _check_finite(**named):
    for name, value in named.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value)):
            raise DomainError(f"{name} must be a finite real, got {value!r}")


def _scale(*values) -> float:
    return max(1.0, *(abs(v) for v in values))


@dataclass(frozen=True)
class AverageQuad:
    """Average-side prescription: ball average band (avg_lower, avg_upper),
    origin-solution band (sol_lower, sol_upper)."""

    avg_lower: float
    sol_lower: float
    sol_upper: float
    avg_upper: float

    def __post_init__(self):
        _check_finite(avg_lower=self.avg_lower, sol_lower=self.sol_lower,
                      sol_upper=self.sol_upper, avg_upper=self.avg_upper)
        if not (self.avg_lower < self.sol_lower < self.sol_upper < self.avg_upper):
            raise DomainError(
                "average-side prescription needs strictly increasing values "
                f"avg_lower < sol_lower < sol_upper < avg_upper, got "
                f"({self.avg_lower}, {self.sol_lower}, {self.sol_upper}, "
                f"{self.avg_upper})")


@dataclass(frozen=True)
class DataQuad:
    """Data-side prescription: initial-data band (data_lower, data_upper),
    origin-solution band (sol_lower, sol_upper)."""

    data_lower: float
    sol_lower: float
    sol_upper: float
    data_upper: float

    def __post_init__(self):
        _check_finite(data_lower=self.data_lower, sol_lower=self.sol_lower,
                      sol_upper=self.sol_upper, data_upper=self.data_upper)
        if not (self.data_lower <= self.sol_lower <= self.sol_upper
                <= self.data_upper):
            raise DomainError(
                "data-side prescription needs ordered values "
                f"data_lower <= sol_lower <= sol_upper <= data_upper, got "
                f"({self.data_lower}, {self.sol_lower}, {self.sol_upper}, "
                f"{self.data_upper})")


@dataclass(frozen=True)
class PrescriptionTarget:
    kind: AverageQuad | DataQuad
    n: int

    def __post_init__(self):
        if not isinstance(self.kind, (AverageQuad, DataQuad)):
            raise DomainError(
                f"kind must be AverageQuad or DataQuad, got {type(self.kind).__name__}")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class PrescriptionCertificate:
    """A constructed expression plus the limit values it guarantees.

    expected_H_band is None when the construction does not pin the ball
    average band analytically (the single-mode and mode-plus-wave data
    constructions); every present band is analytic, never estimated.
    """

    target: PrescriptionTarget
    data: InitialDataExpr
    construction_tag: str
    m_used: float | None
    expected_phi_band: tuple[float, float]
    expected_H_band: tuple[float, float] | None
    expected_u_band: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "expected_phi_band",
                           _checked_band(self.expected_phi_band, "expected_phi_band"))
        object.__setattr__(self, "expected_u_band",
                           _checked_band(self.expected_u_band, "expected_u_band"))
        if self.expected_H_band is not None:
            object.__setattr__(self, "expected_H_band",
                               _checked_band(self.expected_H_band, "expected_H_band"))
        self._check_chain()

    def _check_chain(self):
        """r <= p <= u_lo <= u_hi <= q <= s on all pinned bands."""
        r, s = self.expected_phi_band
        u_lo, u_hi = self.expected_u_band
        chain = [r, u_lo, u_hi, s]
        if self.expected_H_band is not None:
            p, q = self.expected_H_band
            chain = [r, p, u_lo, u_hi, q, s]
        slack = 1e-9 * _scale(*chain)
        for left, right in zip(chain, chain[1:]):
            if left > right + slack:
                raise DomainError(
                    f"certificate band chain violated: {left} > {right} "
                    f"(chain {chain})")


def _checked_band(band, name) -> tuple[float, float]:
    try:
        lo, hi = band
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a (lower, upper) pair, got {band!r}")
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise DomainError(f"{name} must be an ordered finite pair, got {band!r}")
    return (lo, hi)


# ---------------------------------------------------------------------------
# Average-side prescription


def prescribe_average(avg_lower: float, sol_lower: float, sol_upper: float,
                      avg_upper: float, n: int,
                      spec: QuadratureSpec | None = None) -> PrescriptionCertificate:
    """Data whose ball average oscillates in (avg_lower, avg_upper) and whose
    origin solution oscillates in (sol_lower, sol_upper).

    Requires the symmetry avg_lower + avg_upper = sol_lower + sol_upper: both
    bands share one midline, and a single log-sine average with the root-solved
    frequency realizes the inner band exactly.  Asymmetric prescriptions are
    out of this construction's reach (see lemma_not_example for the one
    asymmetric instance with computed, not prescribed, values).
    """
    _check_finite(avg_lower=avg_lower, sol_lower=sol_lower,
                  sol_upper=sol_upper, avg_upper=avg_upper)
    if avg_lower == sol_lower or avg_upper == sol_upper:
        raise DomainError(
            "the full-width case avg_lower = sol_lower (oscillation surviving "
            "averaging at full amplitude) is a known prior construction, out "
            "of scope here; this prescription needs a strictly inner solution "
            "band")
    target = PrescriptionTarget(
        AverageQuad(avg_lower, sol_lower, sol_upper, avg_upper), n)

    scale = _scale(avg_lower, sol_lower, sol_upper, avg_upper)
    if abs((avg_lower + avg_upper) - (sol_lower + sol_upper)) > _EQ_TOL * scale:
        raise DomainError(
            "prescription violates the symmetry condition p + q = alpha + beta "
            f"(avg_lower + avg_upper = {avg_lower + avg_upper} but sol_lower + "
            f"sol_upper = {sol_lower + sol_upper}); asymmetric average-side "
            "bands are not constructible here")

    ratio = (sol_upper - sol_lower) / (avg_upper - avg_lower)
    m_star = solve_m(n, ratio, KernelFlavor.AVERAGE, spec)
    amplitude = (avg_upper - avg_lower) / 2.0
    offset = (avg_upper + avg_lower) / 2.0
    data = LogSineAvgPreimage(amplitude, m_star, offset, n)
    return PrescriptionCertificate(
        target=target,
        data=data,
        construction_tag="average-single-mode",
        m_used=m_star,
        expected_phi_band=analytic_band_phi(data),
        expected_H_band=(avg_lower, avg_upper),
        expected_u_band=(sol_lower, sol_upper),
    )


# ---------------------------------------------------------------------------
# Data-side prescription


def prescribe_data(data_lower: float, sol_lower: float, sol_upper: float,
                   data_upper: float, n: int,
                   spec: QuadratureSpec | None = None) -> PrescriptionCertificate:
    """Data oscillating in (data_lower, data_upper) with origin solution
    oscillating in (sol_lower, sol_upper), for any ordered quadruple.

    Dispatch by the equality pattern and by which side of the midline
    identity data_lower + data_upper = sol_lower + sol_upper the quadruple
    falls on; the short side is handled by reflecting the whole prescription
    through zero, constructing, and negating the result.
    """
    r, a, b, s = data_lower, sol_lower, sol_upper, data_upper
    _check_finite(data_lower=r, sol_lower=a, sol_upper=b, data_upper=s)
    target = PrescriptionTarget(DataQuad(r, a, b, s), n)  # validates ordering

    scale = _scale(r, a, b, s)
    tol = _EQ_TOL * scale

    def close(x, y):
        return abs(x - y) <= tol

    if close(r, a) and close(a, b) and close(b, s):
        data = Constant(a)
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-constant",
            m_used=None, expected_phi_band=analytic_band_phi(data),
            expected_H_band=(a, a), expected_u_band=(a, b))

    if (a + b) - (r + s) > tol:
        # solution band sits above the data band's midline: reflect through
        # zero, construct on the mirrored quadruple, and negate pointwise
        inner = prescribe_data(-s, -b, -a, -r, n, spec)
        data = negate(inner.data)
        h_band = inner.expected_H_band
        return PrescriptionCertificate(
            target=target,
            data=data,
            construction_tag=inner.construction_tag + "-reflected",
            m_used=inner.m_used,
            expected_phi_band=analytic_band_phi(data),
            expected_H_band=None if h_band is None else (-h_band[1], -h_band[0]),
            expected_u_band=(a, b),
        )

    if close(r, a) and close(b, s):
        # both ends touch: slow oscillation passes through averaging untouched
        data = LogLogSine((b - a) / 2.0, (b + a) / 2.0)
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-slow-oscillation",
            m_used=None, expected_phi_band=analytic_band_phi(data),
            expected_H_band=(a, b), expected_u_band=(a, b))

    if close(r, a) and close(a, b):
        # solution pinned at the bottom: sparse upward bumps leave the
        # average (hence the solution) at the baseline
        data = BumpTrain(height=s - a, half_width=0.5, baseline=a,
                         centers=GeometricCenters(math.e))
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-sparse-bumps",
            m_used=None, expected_phi_band=analytic_band_phi(data),
            expected_H_band=(a, a), expected_u_band=(a, b))

    if close(r, a):
        # bottom end touches: slow oscillation realizes (a, b), and bumps
        # pinned to its crests lift the data top to s without moving the
        # solution band
        slow = LogLogSine((b - a) / 2.0, (b + a) / 2.0)
        bumps = BumpTrain(height=s - b, half_width=1.0, baseline=0.0,
                          centers=DoubleExpCenters("peak"))
        data = Sum((slow, bumps))
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-slow-plus-bumps",
            m_used=None, expected_phi_band=analytic_band_phi(data),
            expected_H_band=(a, b), expected_u_band=(a, b))

    if close(a, b):
        # solution band collapses to a point: a zero-mean fast wave spans
        # (r, s) around that point and averages away entirely
        v_max, v_min = s - a, r - a
        wave = PeriodicZeroMean(v_max, v_min, balanced_ramp_width(v_max, v_min))
        data = Sum((wave, Constant(a)))
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-wave-plus-constant",
            m_used=None, expected_phi_band=analytic_band_phi(data),
            expected_H_band=(a, a), expected_u_band=(a, b))

    # strictly interior solution band from here on: r < a < b < s
    if abs((r + s) - (a + b)) <= tol:
        m_star = solve_m(n, (b - a) / (s - r), KernelFlavor.DATA, spec)
        data = LogSine((s - r) / 2.0, m_star, (s + r) / 2.0)
        return PrescriptionCertificate(
            target=target, data=data, construction_tag="data-single-mode",
            m_used=m_star, expected_phi_band=analytic_band_phi(data),
            expected_H_band=None, expected_u_band=(a, b))

    # midline surplus on the data side: shrink the mode to a symmetric
    # sub-quadruple (r + eps, a, b, delta) and add a zero-mean wave
    # stretching the data band back out to (r, s)
    lam = a + b - r
    eps = min(a - r, lam - b) / 2.0
    delta = lam - eps
    m_star = solve_m(n, (b - a) / (delta - (r + eps)), KernelFlavor.DATA, spec)
    mode = LogSine((delta - r - eps) / 2.0, m_star, (delta + r + eps) / 2.0)
    v_max, v_min = s - delta, -eps
    wave = PeriodicZeroMean(v_max, v_min, balanced_ramp_width(v_max, v_min))
    data = Sum((mode, wave))
    return PrescriptionCertificate(
        target=target, data=data, construction_tag="data-mode-plus-wave",
        m_used=m_star, expected_phi_band=analytic_band_phi(data),
        expected_H_band=None, expected_u_band=(a, b))


def balanced_ramp_width(v_max: float, v_min: float) -> float:
    """Ramp width keeping both plateaus of the zero-mean trapezoid positive.

    The default pi/8 fails when the extremes are lopsided (a tall narrow
    spike must balance a long shallow plateau); the positive plateau needs
    w <= 2 pi (-v_min) / (v_max - 3 v_min) and the negative plateau needs
    w <= 2 pi v_max / (3 v_max - v_min).  Half the tighter bound keeps both
    strictly positive.
    """
    if not (v_max > 0 > v_min):
        raise DomainError(f"need v_max > 0 > v_min, got ({v_max}, {v_min})")
    w_plus = TWO_PI * (-v_min) / (v_max - 3.0 * v_min)
    w_minus = TWO_PI * v_max / (3.0 * v_max - v_min)
    return min(math.pi / 8.0, w_plus / 2.0, w_minus / 2.0)


# ---------------------------------------------------------------------------
# The asymmetric two-mode example


def lemma_not_example(spec: QuadratureSpec | None = None) -> PrescriptionCertificate:
    """The two-mode average showing the solution band need not share the
    average band's midline.

    H = sin(log(tau+1)) + sin(2 log(tau+1)) in dimension 1 has a symmetric
    band, but the origin solution's envelope mixes each mode with its own
    kernel phase shift, and the resulting band is measurably asymmetric:
    avg_lower + avg_upper = 0 while sol_lower + sol_upper is about -0.0412.
    """
    n = 1
    h_expr = Sum((LogSine(1.0, 1.0, 0.0), LogSine(1.0, 2.0, 0.0)))
    data = phi_from_H(h_expr, n)

    h_lo, h_hi = TrigPolynomial(0.0, (), (1.0, 1.0)).extrema()

    mom1 = kernel_moments(n, 1.0, KernelFlavor.AVERAGE, spec)
    mom2 = kernel_moments(n, 2.0, KernelFlavor.AVERAGE, spec)
    envelope = TrigPolynomial(0.0,
                              (mom1.b_value, mom2.b_value),
                              (mom1.a_value, mom2.a_value))
    u_lo, u_hi = envelope.extrema()

    target = PrescriptionTarget(AverageQuad(h_lo, u_lo, u_hi, h_hi), n)
    return PrescriptionCertificate(
        target=target,
        data=data,
        construction_tag="average-two-mode-example",
        m_used=None,
        expected_phi_band=analytic_band_phi(data),
        expected_H_band=(h_lo, h_hi),
        expected_u_band=(u_lo, u_hi),
    )


# ---------------------------------------------------------------------------
# Asymptotic envelope of the origin solution


@functools.lru_cache(maxsize=128)
def _cached_moments(n: int, m: float, flavor: KernelFlavor,
                    spec: QuadratureSpec | None):
    return kernel_moments(n, m, flavor, spec)


def envelope_u(cert: PrescriptionCertificate, t: float,
               spec: QuadratureSpec | None = None) -> float:
    """Asymptotic envelope of u(0, t) for a certificate's construction.

    Each log-sine mode contributes amp * [a sin(m y) + b cos(m y)] at
    y = log sqrt(4t), with (a, b) the kernel moments of the flavor matching
    how the mode enters (average-side preimages use the average kernel,
    direct data modes the data kernel).  The doubly-log mode contributes
    amp * sin(log log sqrt(4t)).  Zero-mean waves average away; bump trains
    contribute only their baseline, and a certificate whose oscillating
    content is bumps alone has no envelope formula.
    """
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0):
        raise DomainError(f"t must be a positive finite real, got {t!r}")
    y = 0.5 * math.log(4.0 * t)

    state = {"slow_seen": False, "bumps_seen": False}

    def walk(expr, sign):
        if isinstance(expr, Constant):
            return sign * expr.c
        if isinstance(expr, LogSineAvgPreimage):
            state["slow_seen"] = True
            mom = _cached_moments(expr.n, expr.m, KernelFlavor.AVERAGE, spec)
            osc = mom.a_value * math.sin(expr.m * y) \
                + mom.b_value * math.cos(expr.m * y)
            return sign * (expr.amplitude * osc + expr.offset)
        if isinstance(expr, LogSine):
            state["slow_seen"] = True
            mom = _cached_moments(cert.target.n, expr.m, KernelFlavor.DATA, spec)
            osc = mom.a_value * math.sin(expr.m * y) \
                + mom.b_value * math.cos(expr.m * y)
            return sign * (expr.amplitude * osc + expr.offset)
        if isinstance(expr, LogLogSine):
            state["slow_seen"] = True
            if y <= 0.0:
                raise DomainError(
                    "the doubly-log envelope needs log sqrt(4t) > 0, "
                    f"i.e. t > 0.25; got t = {t}")
            return sign * (expr.amplitude * math.sin(math.log(y)) + expr.offset)
        if isinstance(expr, PeriodicZeroMean):
            return 0.0
        if isinstance(expr, BumpTrain):
            state["bumps_seen"] = True
            return sign * expr.baseline
        if isinstance(expr, Negate):
            return walk(expr.term, -sign)
        if isinstance(expr, Sum):
            return sum(walk(term, sign) for term in expr.terms)
        raise UnsupportedExpression(
            f"no envelope contribution rule for {type(expr).__name__}")

    value = walk(cert.data, 1.0)
    if state["bumps_seen"] and not state["slow_seen"]:
        raise UnsupportedExpression(
            "certificate's oscillating content is bump trains alone; their "
            "origin-solution spikes have no closed envelope formula")
    return float(value)


# ---------------------------------------------------------------------------
# Certificate serialization (schema cert/1)


def cert_to_json(cert: PrescriptionCertificate) -> dict:
    kind = cert.target.kind
    if isinstance(kind, AverageQuad):
        target_doc = {"kind": "average", "avg_lower": kind.avg_lower,
                      "sol_lower": kind.sol_lower, "sol_upper": kind.sol_upper,
                      "avg_upper": kind.avg_upper}
    else:
        target_doc = {"kind": "data", "data_lower": kind.data_lower,
                      "sol_lower": kind.sol_lower, "sol_upper": kind.sol_upper,
                      "data_upper": kind.data_upper}
    target_doc["n"] = cert.target.n
    return {
        "schema": CERT_SCHEMA_ID,
        "target": target_doc,
        "construction_tag": cert.construction_tag,
        "m_used": cert.m_used,
        "data": expr_to_json(cert.data),
        "expected_phi_band": list(cert.expected_phi_band),
        "expected_H_band": (None if cert.expected_H_band is None
                            else list(cert.expected_H_band)),
        "expected_u_band": list(cert.expected_u_band),
    }


def cert_from_json(doc: dict) -> PrescriptionCertificate:
    if not isinstance(doc, dict) or doc.get("schema") != CERT_SCHEMA_ID:
        raise DomainError(
            f"expected schema {CERT_SCHEMA_ID!r}, got {doc.get('schema')!r}")
    tdoc = doc["target"]
    if tdoc.get("kind") == "average":
        kind = AverageQuad(tdoc["avg_lower"], tdoc["sol_lower"],
                           tdoc["sol_upper"], tdoc["avg_upper"])
    elif tdoc.get("kind") == "data":
        kind = DataQuad(tdoc["data_lower"], tdoc["sol_lower"],
                        tdoc["sol_upper"], tdoc["data_upper"])
    else:
        raise DomainError(f"unknown target kind {tdoc.get('kind')!r}")
    target = PrescriptionTarget(kind, int(tdoc["n"]))
    h_band = doc["expected_H_band"]
    return PrescriptionCertificate(
        target=target,
        data=expr_from_json(doc["data"]),
        construction_tag=doc["construction_tag"],
        m_used=doc["m_used"],
        expected_phi_band=tuple(doc["expected_phi_band"]),
        expected_H_band=None if h_band is None else tuple(h_band),
        expected_u_band=tuple(doc["expected_u_band"]),
    )


def cert_dumps(cert: PrescriptionCertificate) -> str:
    return json.dumps(cert_to_json(cert), sort_keys=True)


def cert_loads(text: str) -> PrescriptionCertificate:
    return cert_from_json(json.loads(text))

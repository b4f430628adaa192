"""Spherical-cap measures, unit-ball volumes, and the cap lower-bound chain.

The normalized measure of the spherical cap C_t(u) = {v on the unit sphere :
<v, u> >= t} is

    sigma_t = (d-1) kappa_{d-1} / (d kappa_d) * integral_t^1 (1-x^2)^((d-3)/2) dx

with kappa_d the volume of the d-dimensional Euclidean unit ball. Everything
Gamma-shaped is computed in log space (d up to 1e8 appears in the checks) and
the integrand as exp(((d-3)/2) * log1p(-x^2)) so large d cannot overflow and
near x = 1 there is no cancellation.

The module also exposes the chain of elementary inequalities that certifies

    sigma_t >= t / 140      for t = sqrt(log d / (2d)),

link by link with numeric margins, including the Gautschi Gamma-ratio
sandwich and the tangent-triangle lower bound on the cap integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Method tags for CapResult.
QUADRATURE = "quadrature"
CLOSED_FORM_2D = "closed_form_2d"
CLOSED_FORM_3D = "closed_form_3d"
LOG_LOWER_BOUND = "log_lower_bound"

#: Constant from the cap-measure certificate sigma_t >= t / CAP_LEMMA_C.
CAP_LEMMA_C = 140.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class CapQuery:
    """A cap-measure request: dimension d >= 2 and height t in [0, 1]."""

    d: int
    t: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d!r}")
        if not (0.0 <= self.t <= 1.0):
            raise ValueError(f"cap height must lie in [0, 1], got {self.t!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class CapResult:
    sigma: float
    method: str
    abs_error_estimate: float


def log_unit_ball_volume(d: int) -> float:
    """log of the volume of the d-dimensional Euclidean unit ball."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0)


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball.

    Computed in log space and exponentiated last. The value underflows to 0
    in float64 once d is in the thousands; use :func:`log_unit_ball_volume`
    there.
    """
    return math.exp(log_unit_ball_volume(d))


def _log_surface_ratio(d: int) -> float:
    # log of (d-1) kappa_{d-1} / (d kappa_d)
    return (
        math.log(d - 1)
        - math.log(d)
        - 0.5 * math.log(math.pi)
        + math.lgamma(0.5 * d + 1.0)
        - math.lgamma(0.5 * (d - 1) + 1.0)
    )


class RatioBound(NamedTuple):
    ratio: float
    lower: float
    holds: bool


def surface_ratio_bound(d: int) -> RatioBound:
    """The cap prefactor (d-1) kappa_{d-1} / (d kappa_d) versus sqrt(d)/(2 sqrt(2 pi))."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    ratio = math.exp(_log_surface_ratio(d))
    lower = math.sqrt(d) / (2.0 * math.sqrt(2.0 * math.pi))
    return RatioBound(ratio, lower, ratio >= lower - 1e-12)


class GautschiBounds(NamedTuple):
    lo: float
    val: float
    hi: float


def gautschi_bounds(x: float, lam: float) -> GautschiBounds:
    """Gautschi's sandwich x^(1-lam) <= Gamma(x+1)/Gamma(x+lam) <= (x+1)^(1-lam).

    The ratio is evaluated through log-Gamma; a sandwich violation beyond
    1e-12 relative signals a numeric bug and raises.
    """
    if not (x > 0.0):
        raise ValueError("x must be positive")
    if not (0.0 < lam < 1.0):
        raise ValueError("lambda must lie in (0, 1)")
    val = math.exp(math.lgamma(x + 1.0) - math.lgamma(x + lam))
    lo = x ** (1.0 - lam)
    hi = (x + 1.0) ** (1.0 - lam)
    slack = 1e-12 * max(1.0, abs(val))
    if not (lo <= val + slack and val <= hi + slack):
        raise ArithmeticError(f"Gautschi sandwich failed at x={x}, lambda={lam}")
    return GautschiBounds(lo, val, hi)


def auto_t(d: int, variant: str = "standard") -> float:
    """Cap height schedule.

    standard : t = sqrt(log d / (2d))
    refined  : t = sqrt((log d - 2 log log d) / d), which trades the constant
               in the cap bound; requires log d - 2 log log d > 0 and falls
               back to standard otherwise. (Numerically the expression is
               positive for every integer d >= 2, with minimum ~0.614 near
               d = 7, so the fallback is a guard rather than a live branch.)
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if variant == "standard":
        return math.sqrt(math.log(d) / (2.0 * d))
    if variant == "refined":
        num = math.log(d) - 2.0 * math.log(math.log(d))
        if num <= 0.0:
            import warnings

            warnings.warn(f"refined height infeasible at d={d}; using standard schedule")
            return auto_t(d, "standard")
        return math.sqrt(num / d)
    raise ValueError(f"unknown height variant {variant!r}")


def _integrand(theta: np.ndarray, d: int) -> np.ndarray:
    # sin(theta)^(d-2) through log space; the x = cos(theta) substitution of
    # (1-x^2)^((d-3)/2) dx, which removes the d = 2 endpoint singularity.
    if d == 2:
        return np.ones_like(theta)
    with np.errstate(divide="ignore"):
        return np.exp((d - 2) * np.log(np.sin(theta)))


def _gl_panel(a: float, b: float, d: int) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_WEIGHTS, _integrand(mid + half * _GL_NODES, d)))


def _adaptive_integral(a: float, b: float, d: int, tol: float, max_depth: int = 60):
    """Adaptive Gauss-Legendre for the cap integrand over [a, b].

    An interval is accepted when the 15-node estimate agrees with the sum of
    its two half-interval estimates to within ``tol``; the disagreement is
    the (conservative) error contribution reported for that interval.
    """
    total = 0.0
    err = 0.0
    stack = [(a, b, _gl_panel(a, b, d), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gl_panel(lo, mid, d)
        right = _gl_panel(mid, hi, d)
        disagreement = abs(left + right - whole)
        if disagreement <= tol or depth >= max_depth:
            total += left + right
            err += disagreement
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total, err


def cap_measure(q: CapQuery, target_abs_error: float = 1e-12) -> CapResult:
    """Normalized measure of a spherical cap of height t, by quadrature.

    If the target absolute error proves unreachable the best value is
    returned with an honest error estimate rather than raising.
    """
    if q.t >= 1.0:
        return CapResult(0.0, QUADRATURE, 0.0)
    log_ratio = _log_surface_ratio(q.d)
    ratio = math.exp(log_ratio)
    panel_tol = max(target_abs_error / ratio / 8.0, 1e-16)
    integral, ierr = _adaptive_integral(0.0, math.acos(q.t), q.d, panel_tol)
    sigma = ratio * integral
    sigma = min(max(sigma, 0.0), 0.5) if sigma < 0.0 or sigma > 0.5 + 1e-9 else sigma
    return CapResult(float(sigma), QUADRATURE, float(ratio * ierr))


def cap_measure_closed(q: CapQuery) -> CapResult:
    """Closed forms for d = 2 (arccos(t)/pi) and d = 3 ((1-t)/2).

    These are the independent cross-checks for the quadrature path.
    """
    if q.d == 2:
        return CapResult(math.acos(q.t) / math.pi, CLOSED_FORM_2D, 0.0)
    if q.d == 3:
        return CapResult(0.5 * (1.0 - q.t), CLOSED_FORM_3D, 0.0)
    raise ValueError("closed forms exist only for d in {2, 3}")


def log_triangle_lower_bound(d: int, t: float) -> float:
    """log of the tangent-triangle lower bound on sigma_t.

    The bound is sqrt(d)/(2 sqrt(2 pi)) * (1-t^2)^(d/2+1) / (2 d t); it uses
    convexity of (1-x^2)^(d/2) on [t, 1], which needs d >= 10 and
    t > 1/sqrt(d-1).
    """
    if d < 10:
        raise ValueError("triangle bound requires d >= 10")
    if not (t > 1.0 / math.sqrt(d - 1)):
        raise ValueError("triangle bound requires t > 1/sqrt(d-1)")
    if t >= 1.0:
        return -math.inf
    return (
        0.5 * math.log(d)
        - math.log(2.0)
        - 0.5 * math.log(2.0 * math.pi)
        + (0.5 * d + 1.0) * math.log1p(-t * t)
        - math.log(2.0 * d * t)
    )


def triangle_lower_bound(d: int, t: float) -> float:
    """Linear-space value of :func:`log_triangle_lower_bound`."""
    return math.exp(log_triangle_lower_bound(d, t))


@dataclass(frozen=True)
class CapLemmaResult:
    """Outcome of the sigma_t >= t/140 certificate at the standard height."""

    sigma: float
    threshold: float
    holds: bool
    method: str
    small_d_sigma_ok: bool | None = None  # sigma >= 0.05, asserted for 2 <= d <= 9
    small_d_threshold_ok: bool | None = None  # t/140 <= 0.004, same range


def lemma_c140_check(d: int) -> CapLemmaResult:
    """Check sigma_t >= t/140 at t = sqrt(log d / (2d)).

    Quadrature is used while it resolves sigma; if the quadrature value
    underflows or is smaller than its own error estimate, the comparison
    switches to log space against the triangle lower bound.
    """
    t = auto_t(d, "standard")
    threshold = t / CAP_LEMMA_C
    res = cap_measure(CapQuery(d, t))
    sigma = res.sigma
    if sigma <= 0.0 or sigma <= res.abs_error_estimate:
        log_lb = log_triangle_lower_bound(d, t)
        holds = log_lb >= math.log(threshold)
        method = LOG_LOWER_BOUND
    else:
        holds = sigma >= threshold
        method = QUADRATURE
    if 2 <= d <= 9:
        s_ok = sigma >= 0.05
        t_ok = threshold <= 0.004
        return CapLemmaResult(sigma, threshold, holds and s_ok and t_ok, method, s_ok, t_ok)
    return CapLemmaResult(sigma, threshold, holds, method)


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: float
    rhs: float
    margin: float
    holds: bool


@dataclass(frozen=True)
class ChainReport:
    d: int
    links: tuple[ChainLink, ...]
    all_hold: bool

    def link(self, name: str) -> ChainLink:
        for ln in self.links:
            if ln.name == name:
                return ln
        raise KeyError(name)


#: Dimension at which the final branch of the chain splits.
CHAIN_D0 = 4 * 10**7


def inequality_chain_check(d: int) -> ChainReport:
    """Numerically verify each link of the sigma_t >= t/140 derivation at d.

    Links (c = 140, eps = log d / (2d), t per the standard schedule):

      gautschi_ratio : (d-1) k_{d-1} / (d k_d) >= sqrt(d) / (2 sqrt(2 pi))
      log_lower      : log(1 - eps) > -eps / (1 - eps)
      five_sixths    : 1 - eps >= 5/6                      (valid for d >= 10)
      log_inequality : (d/2) log(1 - eps) >= -log(2c/13) + log log d - (1/2) log d
      referenced     : log d <= (5/3)(log d - 2 log log d + 2 log(2c/13))
      branch_large   : log log d < (1/5) log d             (applies for d >= 4e7)
      branch_small   : log log d < 3 and log(2c/13) > 3    (applies for d <= 4e7)

    At the split point both branch conditions are evaluated.
    """
    if d < 10:
        raise ValueError("the chain is stated for d >= 10")
    c = CAP_LEMMA_C
    logd = math.log(d)
    loglogd = math.log(logd)
    eps = logd / (2.0 * d)
    log2c13 = math.log(2.0 * c / 13.0)

    links: list[ChainLink] = []

    ratio, lower, _ = surface_ratio_bound(d)
    links.append(ChainLink("gautschi_ratio", ratio, lower, ratio - lower, ratio > lower))

    lhs = math.log1p(-eps)
    rhs = -eps / (1.0 - eps)
    links.append(ChainLink("log_lower", lhs, rhs, lhs - rhs, lhs > rhs))

    links.append(ChainLink("five_sixths", 1.0 - eps, 5.0 / 6.0, (1.0 - eps) - 5.0 / 6.0, 1.0 - eps > 5.0 / 6.0))

    lhs = 0.5 * d * math.log1p(-eps)
    rhs = -log2c13 + loglogd - 0.5 * logd
    links.append(ChainLink("log_inequality", lhs, rhs, lhs - rhs, lhs > rhs))

    rhs = (5.0 / 3.0) * (logd - 2.0 * loglogd + 2.0 * log2c13)
    links.append(ChainLink("referenced", logd, rhs, rhs - logd, logd < rhs))

    if d >= CHAIN_D0:
        links.append(ChainLink("branch_large", loglogd, logd / 5.0, logd / 5.0 - loglogd, loglogd < logd / 5.0))
    if d <= CHAIN_D0:
        m = min(3.0 - loglogd, log2c13 - 3.0)
        links.append(ChainLink("branch_small", loglogd, 3.0, m, loglogd < 3.0 and log2c13 > 3.0))

    return ChainReport(d, tuple(links), all(ln.holds for ln in links))

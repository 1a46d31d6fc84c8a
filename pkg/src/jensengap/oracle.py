"""Independent Jensen gap estimates and verdicts on bound reports.

The gap E[f(X)] - f(E[X]) is computed here without reference to any bound
formula, so it can sit on the other side of every check: exact summation for
discrete support, certified quadrature for the named continuous families,
Monte Carlo for averaged ones.  ``verify`` then compares a bound report
against a gap estimate, treating the estimate's error bar as the deciding
margin.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DEFAULT_GAP_SAMPLES, DEFAULT_NODES
from .errors import DomainError, InvalidParameterError
from .functions import eval_many, evaluate
from .serialize import encode_float


@dataclass(frozen=True)
class GapEstimate:
    """One oracle gap value with its error bar.

    ``abs_error`` is a 95% confidence radius for Monte Carlo and a certified
    truncation-plus-quadrature remainder otherwise; exact sums report 0.
    """

    value: float
    method: str
    abs_error: float
    count: int
    mu: float
    seed: int | None = None
    f_label: str = ""
    dist_label: str = ""

    def to_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "abs_error": self.abs_error,
            "count": self.count,
            "mu": self.mu,
            "seed": self.seed,
            "f_label": self.f_label,
            "dist_label": self.dist_label,
        }


@dataclass(frozen=True)
class VerifyResult:
    """Verdict of a bound-versus-gap comparison.

    ``margin`` is the distance to the deciding boundary: slack remaining on
    a pass, violation size on a fail, overlap width when inconclusive.
    """

    verdict: str
    margin: float
    detail: str

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "margin": encode_float(self.margin),
            "detail": self.detail,
        }


def _integrand(f):
    # Quadrature feeds scalars, the discrete and sampling paths feed arrays.
    def g(x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return evaluate(f, float(arr))
        return eval_many(f, arr)

    return g


def jensen_gap(f, dist, *, samples=DEFAULT_GAP_SAMPLES, nodes=DEFAULT_NODES,
               seed=None):
    """E[f(X)] - f(E[X]) with method picked by the distribution's structure."""
    support = dist.support_interval()
    if support.lo < f.domain.lo or support.hi > f.domain.hi:
        raise DomainError(
            f"support {support.to_list()} of {dist.variant} escapes the "
            f"domain {f.domain.to_list()} of {f.label}"
        )
    mu = dist.mean()
    if not f.domain.contains(mu):
        raise DomainError(f"mean {mu} lies outside the domain of {f.label}")
    est = dist.expect(_integrand(f), nodes=nodes, samples=samples, seed=seed)
    gap = est.value - evaluate(f, mu)
    return GapEstimate(
        value=float(gap),
        method=est.method,
        abs_error=float(est.abs_error),
        count=int(est.count),
        mu=float(mu),
        seed=seed,
        f_label=f.label,
        dist_label=dist.variant,
    )


# Floating-point slack for boundary equality: bound and gap travel different
# arithmetic routes, so exact sharpness cases may disagree by a few ulps.
_BOUNDARY_SLACK = 1e-12


def _slack(value):
    return _BOUNDARY_SLACK * max(1.0, abs(value))


def verify(report, gap):
    """Check a gap estimate against a bound report.

    pass: the whole error bar sits on the claimed side.  fail: the whole
    error bar sits on the wrong side.  inconclusive: the bar straddles the
    bound.  Reports centered at a different mean are rejected.
    """
    if not math.isclose(report.mu, gap.mu, rel_tol=1e-9, abs_tol=1e-9):
        raise InvalidParameterError(
            f"bound is centered at {report.mu} but the gap was computed "
            f"about {gap.mu}; they do not refer to the same problem"
        )
    err = gap.abs_error + report.uncertainty

    if report.kind in ("upper", "general_upper"):
        bound = report.value
        lo, hi = abs(gap.value) - err, abs(gap.value) + err
        if hi <= bound + _slack(bound):
            return VerifyResult("pass", bound - hi, f"|J| <= {bound:.9g}")
        if lo > bound + _slack(bound):
            return VerifyResult(
                "fail", lo - bound,
                f"|J| exceeds the upper bound {bound:.9g} by {lo - bound:.3g}",
            )
        return VerifyResult("inconclusive", hi - lo,
                            "error bar straddles the upper bound")

    if report.kind == "variance_interval":
        lo_b, hi_b = report.value
        lo, hi = gap.value - err, gap.value + err
        if lo >= lo_b - _slack(lo_b) and hi <= hi_b + _slack(hi_b):
            margin = min(hi_b - hi, lo - lo_b)
            return VerifyResult("pass", margin,
                                f"J inside [{lo_b:.9g}, {hi_b:.9g}]")
        if hi < lo_b - _slack(lo_b) or lo > hi_b + _slack(hi_b):
            out = max(lo_b - hi, lo - hi_b)
            return VerifyResult("fail", out,
                                f"J escapes [{lo_b:.9g}, {hi_b:.9g}]")
        return VerifyResult("inconclusive", err,
                            "error bar straddles an interval endpoint")

    # Lower-bound kinds claim s*J >= value in the declared sign direction.
    sign = dict(report.params).get("sign", "gap_above")
    s = -1.0 if sign == "gap_below" else 1.0
    bound = report.value
    lo, hi = s * gap.value - err, s * gap.value + err
    if lo >= bound - _slack(bound):
        return VerifyResult("pass", lo - bound,
                            f"signed gap >= lower bound {bound:.9g}")
    if hi < bound - _slack(bound):
        return VerifyResult(
            "fail", bound - hi,
            f"signed gap falls short of the lower bound {bound:.9g} "
            f"by {bound - hi:.3g}",
        )
    return VerifyResult("inconclusive", hi - lo,
                        "error bar straddles the lower bound")

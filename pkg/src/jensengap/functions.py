"""Function model: evaluation domains, growth declarations, and linear shifts.

A :class:`FunctionSpec` packages the callable f together with the interval I
it lives on, the anchor point mu where the gap E[f(X)] - f(E[X]) is taken,
and an optional analytic slope at mu.  Subtracting the tangent-like line
a*(x - mu) never changes the gap, but it can shrink the envelope constants
dramatically, so the shift is a first-class operation here.

Growth declarations state which power-law envelope the caller believes f
fits.  ``validate_growth`` checks the claim on a log-spaced probe grid and
reports the worst probe; it is a heuristic screen, not a proof.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ConditionViolationError,
    DerivativeEstimateError,
    DomainError,
    EvaluationError,
    InvalidParameterError,
)

EPS = float(np.finfo(float).eps)

# Probe layout shared with the envelope solver: offsets |x - mu| span
# PROBE_DECADES decades below 1 up to PROBE_DECADES above.
MIN_OFFSET = 1e-8
MAX_OFFSET = 1e8
VALIDATION_PROBES_PER_SIDE = 33

# A probe value is only trusted when it clears the cancellation noise floor
# by this factor; see ``noise_floor``.
RELIABILITY_FACTOR = 100.0


def noise_floor(fx, fmu):
    """Absolute rounding-noise scale for the difference f(x) - f(mu).

    Deliberately conservative: evaluation of f near mu loses the leading
    digits of the difference to cancellation, and a black-box rule gives us
    no better handle than the magnitudes involved.
    """
    return 16.0 * EPS * (np.abs(fx) + abs(fmu) + 1.0)


@dataclass(frozen=True)
class Interval:
    """Closed interval of reals; either endpoint may be infinite."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise InvalidParameterError("interval endpoints must not be NaN")
        if not self.lo <= self.hi:
            raise InvalidParameterError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x):
        return self.lo <= x <= self.hi

    def to_list(self):
        return [None if math.isinf(self.lo) else self.lo,
                None if math.isinf(self.hi) else self.hi]

    @classmethod
    def from_list(cls, pair):
        lo = -math.inf if pair[0] is None else float(pair[0])
        hi = math.inf if pair[1] is None else float(pair[1])
        return cls(lo, hi)


GAP_ABOVE = "gap_above"
GAP_BELOW = "gap_below"


@dataclass(frozen=True)
class GrowthDeclaration:
    """Declared power-law envelope for f around mu and at the ends of I.

    role "upper": |f(x) - f(mu)| = O(|x - mu|^alpha) near mu and
    O(|x - mu|^n) far away, with 0 < alpha <= n.

    role "lower": the gap f(x) - f(mu) (or its negative, per ``sign``) is
    strictly positive off mu, Omega(|x - mu|^alpha) near mu and
    Omega(|x - mu|^beta) far away, with 0 <= beta <= alpha.
    """

    role: str
    alpha: float
    n: float | None = None
    beta: float | None = None
    sign: str = GAP_ABOVE

    def __post_init__(self):
        if self.role not in ("upper", "lower"):
            raise InvalidParameterError(f"role must be 'upper' or 'lower', got {self.role!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidParameterError(f"alpha must be positive and finite, got {self.alpha}")
        if self.role == "upper":
            if self.n is None or not (self.n >= self.alpha and math.isfinite(self.n)):
                raise InvalidParameterError("upper role needs n >= alpha")
        else:
            if self.beta is None or not (0 <= self.beta <= self.alpha):
                raise InvalidParameterError("lower role needs 0 <= beta <= alpha")
            if self.sign not in (GAP_ABOVE, GAP_BELOW):
                raise InvalidParameterError(f"sign must be gap_above or gap_below, got {self.sign!r}")


@dataclass(frozen=True)
class FunctionSpec:
    """A function together with its interval, anchor point, and metadata.

    ``rule`` must accept a float (and ideally a numpy array) of points inside
    ``domain`` and return finite values.  ``slope_at_mu`` is the analytic
    derivative at mu when one is known; for a convex kink it is the midpoint
    of the subgradient interval.
    """

    label: str
    rule: object = field(repr=False)
    domain: Interval
    mu: float
    slope_at_mu: float | None = None
    descriptor: tuple = ()

    def __post_init__(self):
        if not self.domain.contains(self.mu):
            raise DomainError(f"mu = {self.mu} lies outside the domain {self.domain}")

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self):
        return dict(self.descriptor) if self.descriptor else {"kind": "custom", "mu": self.mu}


def evaluate(f, x):
    """f(x) with domain and finiteness checks."""
    if not f.domain.contains(x):
        raise DomainError(f"x = {x} outside domain {f.domain} of {f.label}")
    val = float(f.rule(x))
    if not math.isfinite(val):
        raise EvaluationError(f"{f.label} returned {val} at x = {x}")
    return val


def eval_many(f, xs):
    """Vectorized evaluation over points already known to lie in the domain."""
    xs = np.asarray(xs, dtype=float)
    try:
        vals = np.asarray(f.rule(xs), dtype=float)
        if vals.shape != xs.shape:
            raise ValueError
    except Exception:
        vals = np.array([float(f.rule(x)) for x in xs])
    if not np.all(np.isfinite(vals)):
        bad = xs[~np.isfinite(vals)][:1]
        raise EvaluationError(f"{f.label} returned a non-finite value near x = {bad}")
    return vals


# ---------------------------------------------------------------------------
# Built-in function rules

def _poly_slope(coeffs, mu):
    return float(sum(i * c * mu ** (i - 1) for i, c in enumerate(coeffs) if i > 0))


def make_function(kind, mu=0.0, domain=None, **params):
    """Build a FunctionSpec for one of the built-in rules.

    Kinds: sin, cos, log, sqrt, pow4, polynomial(coeffs=...),
    abs_power(alpha=...), abs_power_sum(alpha=..., n=...),
    shifted(base=..., slope=...).
    """
    mu = float(mu)
    desc = {"kind": kind, "mu": mu}

    if kind == "sin":
        rule, dom, slope = np.sin, Interval(), math.cos(mu)
    elif kind == "cos":
        rule, dom, slope = np.cos, Interval(), -math.sin(mu)
    elif kind == "log":
        if domain is None:
            raise InvalidParameterError(
                "log needs an explicit domain with a positive lower endpoint; "
                "it is unbounded on compact neighborhoods of 0")
        if mu <= 0:
            raise InvalidParameterError(f"log needs mu > 0, got {mu}")
        rule, dom, slope = np.log, None, 1.0 / mu
    elif kind == "sqrt":
        rule, dom = np.sqrt, Interval(0.0, math.inf)
        slope = 0.5 / math.sqrt(mu) if mu > 0 else None
    elif kind == "pow4":
        rule, dom, slope = (lambda x: x ** 4), Interval(), 4.0 * mu ** 3
    elif kind == "polynomial":
        coeffs = tuple(float(c) for c in params["coeffs"])
        if not coeffs:
            raise InvalidParameterError("polynomial needs at least one coefficient")
        rule = lambda x, c=coeffs: np.polynomial.polynomial.polyval(x, c)
        dom, slope = Interval(), _poly_slope(coeffs, mu)
        desc["coeffs"] = list(coeffs)
    elif kind == "abs_power":
        alpha = float(params["alpha"])
        if alpha <= 0:
            raise InvalidParameterError("abs_power needs alpha > 0")
        rule = lambda x, a=alpha, m=mu: np.abs(x - m) ** a
        dom = Interval()
        # alpha > 1: differentiable with slope 0; alpha == 1: kink, midpoint
        # of the subgradient [-1, 1]; alpha < 1: cusp, no usable slope.
        slope = 0.0 if alpha >= 1 else None
        desc["alpha"] = alpha
    elif kind == "abs_power_sum":
        alpha, n = float(params["alpha"]), float(params["n"])
        if not 0 < alpha <= n:
            raise InvalidParameterError("abs_power_sum needs 0 < alpha <= n")
        rule = lambda x, a=alpha, b=n, m=mu: np.abs(x - m) ** a + np.abs(x - m) ** b
        dom = Interval()
        slope = 0.0 if alpha >= 1 else None
        desc["alpha"], desc["n"] = alpha, n
    else:
        raise InvalidParameterError(f"unknown function kind {kind!r}")

    if domain is not None:
        dom = domain if isinstance(domain, Interval) else Interval.from_list(list(domain))
    if kind == "log" and dom.lo <= 0:
        raise InvalidParameterError(f"log domain must have a positive lower endpoint, got {dom.lo}")
    if kind == "sqrt" and dom.lo < 0:
        raise InvalidParameterError("sqrt domain must lie in [0, inf)")
    desc["domain"] = dom.to_list()

    label = kind if kind not in ("abs_power", "abs_power_sum", "polynomial") else \
        {"abs_power": f"|x-{mu:g}|^{params.get('alpha')}",
         "abs_power_sum": f"|x-{mu:g}|^{params.get('alpha')} + |x-{mu:g}|^{params.get('n')}",
         "polynomial": "poly" + str(list(params.get("coeffs", [])))}[kind]
    return FunctionSpec(label=label, rule=rule, domain=dom, mu=mu,
                        slope_at_mu=slope, descriptor=tuple(sorted(desc.items(), key=lambda kv: kv[0])))


def custom_function(rule, mu, domain=None, slope_at_mu=None, label="custom"):
    """Wrap an arbitrary callable as a FunctionSpec."""
    dom = domain if isinstance(domain, Interval) else (
        Interval() if domain is None else Interval.from_list(list(domain)))
    return FunctionSpec(label=label, rule=rule, domain=dom, mu=float(mu),
                        slope_at_mu=None if slope_at_mu is None else float(slope_at_mu))


def function_from_dict(d):
    """Parse the JSON descriptor form of a function."""
    if not isinstance(d, dict) or "kind" not in d:
        raise InvalidParameterError("function descriptor must be an object with a 'kind' key")
    d = dict(d)
    kind = d.pop("kind")
    if kind == "shifted":
        base = function_from_dict(d["base"])
        return linear_shift(base, float(d["slope"]))
    mu = d.pop("mu", 0.0)
    domain = d.pop("domain", None)
    return make_function(kind, mu=mu, domain=domain, **d)


# ---------------------------------------------------------------------------
# Linear shift

def linear_shift(f, a):
    """g(x) = f(x) - a*(x - mu).  Leaves the gap E[g(X)] - g(E[X]) unchanged."""
    a = float(a)
    base_rule, mu = f.rule, f.mu
    rule = lambda x: base_rule(x) - a * (np.asarray(x) - mu)
    slope = None if f.slope_at_mu is None else f.slope_at_mu - a
    desc = (("base", f.to_dict()), ("kind", "shifted"), ("slope", a))
    return FunctionSpec(label=f"{f.label} - {a:g}*(x-{mu:g})", rule=rule,
                        domain=f.domain, mu=mu, slope_at_mu=slope, descriptor=desc)


def select_shift_slope(f):
    """Slope a to remove at mu: analytic when declared, else finite differences.

    The central difference is Richardson-refined once; a one-sided pair is
    compared first so a kink yields the subgradient midpoint instead of a
    meaningless average across it.
    """
    if f.slope_at_mu is not None:
        return float(f.slope_at_mu)

    mu, dom = f.mu, f.domain
    h = max(abs(mu), 1.0) * EPS ** (1.0 / 3.0)
    while h > 0 and not (dom.contains(mu + 2 * h) or dom.contains(mu - 2 * h)):
        h /= 4.0
    if h == 0:
        raise DerivativeEstimateError("domain too small for finite differences", math.inf)

    def one_sided(sgn, step):
        # second-order one-sided difference
        f0, f1, f2 = (evaluate(f, mu),
                      evaluate(f, mu + sgn * step),
                      evaluate(f, mu + sgn * 2 * step))
        return sgn * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step)

    right_ok = dom.contains(mu + 2 * h)
    left_ok = dom.contains(mu - 2 * h)
    scale = max(1.0, abs(evaluate(f, mu)))

    if right_ok and left_ok:
        d_plus, d_minus = one_sided(+1, h), one_sided(-1, h)
        if abs(d_plus - d_minus) > 1e-5 * max(scale, abs(d_plus), abs(d_minus)):
            return 0.5 * (d_plus + d_minus)
        central = lambda s: (evaluate(f, mu + s) - evaluate(f, mu - s)) / (2.0 * s)
        d1, d2 = central(h), central(h / 2.0)
        refined = (4.0 * d2 - d1) / 3.0
    else:
        sgn = +1 if right_ok else -1
        d1, d2 = one_sided(sgn, h), one_sided(sgn, h / 2.0)
        refined = (4.0 * d2 - d1) / 3.0

    residual = abs(refined - d2)
    if residual > 1e-5 * max(scale, abs(refined)):
        raise DerivativeEstimateError(
            f"slope estimate did not converge at mu = {mu} (residual {residual:.3g})", residual)
    return refined


# ---------------------------------------------------------------------------
# Growth validation

@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    role: str
    worst_x: float
    worst_ratio: float
    message: str = ""


def _side_offsets(domain, mu, count=VALIDATION_PROBES_PER_SIDE):
    """Log-spaced probe offsets for each side of mu, clipped to the domain.

    Returns (right, left) offset arrays; an empty array means that side of
    mu has no room inside the interval.
    """
    sides = []
    for reach in (domain.hi - mu, mu - domain.lo):
        top = min(reach, MAX_OFFSET)
        if top <= MIN_OFFSET:
            sides.append(np.empty(0))
        else:
            sides.append(np.geomspace(MIN_OFFSET, top, count))
    return sides[0], sides[1]


def _diverges_toward(ratios, span=6, factor=50.0):
    """True when `ratios`, ordered with the end of interest first, climbs
    monotonically (one wobble allowed) by more than `factor` over `span`
    probes.  A doubled baseline catches slower power-law climbs, but only
    while the probes nearest the end are still rising themselves: a profile
    that levels off at the end has converged no matter how far it fell
    further out."""
    for steps, head_climb in ((span, 0.0), (2 * span, 2.0)):
        if len(ratios) < steps + 1:
            continue
        head = ratios[: steps + 1]
        wobbles = sum(1 for i in range(steps) if head[i] < head[i + 1])
        if (wobbles <= 1 and head[0] > factor * head[steps]
                and head[0] == max(head) and head[0] > head_climb * head[3]):
            return True
    return False


def validate_growth(f, decl):
    """Check a GrowthDeclaration on the probe grid.

    Heuristic screen: the upper role fails when the envelope ratio climbs
    without sign of leveling toward mu or infinity; the lower role fails on
    an observed sign violation or a ratio decaying toward zero.  The report
    carries the worst probe either way.
    """
    fmu = evaluate(f, f.mu)
    right, left = _side_offsets(f.domain, f.mu)
    if len(right) == 0 and len(left) == 0:
        return GrowthReport(False, decl.role, f.mu, math.nan, "no probe room inside the domain")

    worst_x, worst_ratio = f.mu, -math.inf if decl.role == "upper" else math.inf
    ok, message = True, ""

    for sgn, offs in ((+1, right), (-1, left)):
        if len(offs) == 0:
            continue
        xs = f.mu + sgn * offs
        fx = eval_many(f, xs)
        diff = fx - fmu
        noise = noise_floor(fx, fmu)

        if decl.role == "upper":
            num = np.abs(diff)
            den = offs ** decl.alpha + offs ** decl.n
            trusted = (num == 0.0) | (num >= RELIABILITY_FACTOR * noise)
            ratio = num / den
        else:
            num = diff if decl.sign == GAP_ABOVE else -diff
            den = 1.0 / (offs ** -decl.beta + offs ** -decl.alpha) if decl.beta > 0 else \
                1.0 / (1.0 + offs ** -decl.alpha)
            trusted = np.abs(num) >= RELIABILITY_FACTOR * noise
            violations = trusted & (num < 0)
            if np.any(violations):
                i = int(np.argmin(num / den))
                return GrowthReport(False, decl.role, float(xs[i]), float(num[i] / den[i]),
                                    "sign violation: the declared gap direction fails at this probe")
            ratio = num / den

        r = ratio[trusted]
        x_t = xs[trusted]
        if len(r) == 0:
            continue

        if decl.role == "upper":
            i = int(np.argmax(r))
            if r[i] > worst_ratio:
                worst_ratio, worst_x = float(r[i]), float(x_t[i])
            # Probes where the difference rounded to exactly zero say nothing
            # about the ratio and would mask a climb right next to them.
            r_pos = r[r > 0.0]
            # toward mu (offsets ascending -> index 0 is nearest mu)
            if _diverges_toward(r_pos):
                ok, message = False, "ratio climbs unboundedly toward mu; alpha is too large"
            # toward the far end, only when this side is unbounded
            if math.isinf(f.domain.hi if sgn > 0 else f.domain.lo) and _diverges_toward(r_pos[::-1]):
                ok, message = False, "ratio climbs unboundedly toward infinity; n is too small"
        else:
            i = int(np.argmin(r))
            if r[i] < worst_ratio:
                worst_ratio, worst_x = float(r[i]), float(x_t[i])
            inv = 1.0 / np.maximum(r, 1e-300)
            if _diverges_toward(inv):
                ok, message = False, "ratio decays toward zero at mu; alpha is too small"
            if math.isinf(f.domain.hi if sgn > 0 else f.domain.lo) and _diverges_toward(inv[::-1]):
                ok, message = False, "ratio decays toward zero at infinity; beta is too large"

    if decl.role == "lower" and not math.isfinite(worst_ratio):
        return GrowthReport(False, decl.role, f.mu, math.nan,
                            "no probe rose above the noise floor; cannot certify positivity")
    return GrowthReport(ok, decl.role, worst_x, worst_ratio, message)


def infer_gap_sign(f):
    """Probe whether f - f(mu) keeps one sign on the grid.

    Returns "gap_above", "gap_below", or None when the signs are mixed or
    nothing rises above the noise floor.
    """
    fmu = evaluate(f, f.mu)
    right, left = _side_offsets(f.domain, f.mu)
    signs = set()
    for sgn, offs in ((+1, right), (-1, left)):
        if len(offs) == 0:
            continue
        xs = f.mu + sgn * offs
        fx = eval_many(f, xs)
        diff = fx - fmu
        trusted = np.abs(diff) >= RELIABILITY_FACTOR * noise_floor(fx, fmu)
        signs.update(np.sign(diff[trusted]).tolist())
    if signs == {1.0}:
        return GAP_ABOVE
    if signs == {-1.0}:
        return GAP_BELOW
    return None

"""Envelope constants: extrema of a function against power-law comparison curves.

Every bound in this package reduces to one number: the supremum or infimum of
``(f(x) - f(mu))`` divided (or multiplied) by a sum of powers of ``|x - mu|``.
This module computes those extrema with a shared probe-refine-extrapolate
solver and packages the result with enough context to audit it.

Extrema are located by a coarse scan over log-spaced offsets on each side of
the mean, golden-section refinement of the surviving brackets, and a limit
extrapolation at the two ends (``x -> mu`` and ``|x| -> inf``).  Probes whose
ratio is indistinguishable from floating-point cancellation noise are
discarded before any of that happens; see ``functions.noise_floor``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditionViolationError,
    DegenerateEnvelopeError,
    InvalidParameterError,
    UnboundedEnvelopeError,
)
from .functions import (
    EPS,
    GAP_ABOVE,
    GAP_BELOW,
    MAX_OFFSET,
    MIN_OFFSET,
    GrowthDeclaration,
    eval_many,
    evaluate,
    noise_floor,
    select_shift_slope,
    validate_growth,
)
from .serialize import encode_float

DEFAULT_PROBES_PER_SIDE = 400
MAX_REFINE_ITERATIONS = 60
MAX_BRACKETS = 12
# Probes are kept only when the ratio clears the noise floor by this factor,
# which caps the relative rounding error a surviving probe can carry; 1e6
# leaves worst-case probe noise near 1e-8, comfortably under the accuracy
# target of the solver.
TRUST_FACTOR = 1e6
TIE_TOLERANCE = 1e-6
DIVERGENCE_FACTOR = 50.0
DIVERGENCE_DECADES = 3.0
DEGENERACY_TOLERANCE = 1e-12

INTERIOR = "interior"
AT_MU = "at_mu"
AT_INFINITY = "at_infinity"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverDiagnostics:
    """How hard the solver worked for one envelope constant."""

    probes: int
    refinements: int
    bracket_width: float

    def to_dict(self):
        return {
            "probes": self.probes,
            "refinements": self.refinements,
            "bracket_width": self.bracket_width,
        }


@dataclass(frozen=True)
class EnvelopeConstant:
    """One computed extremum, with where and how it was attained.

    ``location`` is ``"interior"`` for an extremum at a finite point away from
    the mean, ``"at_mu"`` when the extremum is the limit as ``x -> mu`` (then
    ``arg`` is the mean itself), and ``"at_infinity"`` for a limit or
    divergence at the far end (then ``arg`` is None).
    """

    value: float
    arg: float | None
    location: str
    role: str
    mu: float
    params: tuple
    validated: bool
    diag: SolverDiagnostics

    def to_dict(self):
        return {
            "value": encode_float(self.value),
            "arg": self.arg,
            "location": self.location,
            "role": self.role,
            "mu": self.mu,
            "params": {k: v for k, v in self.params},
            "validated": self.validated,
            "diag": self.diag.to_dict(),
        }


@dataclass(frozen=True)
class _Candidate:
    # Internal scoring record; w is the maximized quantity (sign-flipped for
    # infima), tie_offset and side_rank implement the reporting preference
    # for the attainment point closest to the mean, positive side first.
    w: float
    tie_offset: float
    side_rank: int
    arg: float | None
    location: str
    width: float = 0.0


def _sides(f, max_offset):
    out = []
    for sign in (+1.0, -1.0):
        reach = (f.domain.hi - f.mu) if sign > 0 else (f.mu - f.domain.lo)
        top = min(reach, max_offset)
        if top > MIN_OFFSET:
            out.append((sign, top, math.isinf(reach)))
    if not out:
        raise InvalidParameterError(
            "domain leaves no room on either side of the mean"
        )
    return out


def _diverges(offsets, w, at_start):
    """True when w climbs monotonically (one wobble allowed) toward one end.

    ``at_start`` selects the near-mean end of the arrays; otherwise the far
    end.  The climb must span DIVERGENCE_DECADES decades of offset and gain
    at least DIVERGENCE_FACTOR over the window.
    """
    if not at_start:
        offsets = offsets[::-1]
        w = w[::-1]
    if len(w) < 7:
        return False
    span = np.abs(np.log10(offsets / offsets[0]))
    j = int(np.searchsorted(span, DIVERGENCE_DECADES))
    if j >= len(w) or j < 6:
        return False
    head = w[: j + 1]
    if head[0] <= 0 or head[0] < np.max(head):
        return False
    wobbles = int(np.sum(head[:-1] < head[1:]))
    return head[0] >= DIVERGENCE_FACTOR * abs(head[j]) and wobbles <= j // 6


def _aitken(v1, v2, v3):
    """Delta-squared limit of a sequence converging like a power law.

    v3 is the term nearest the limit.  Falls back to v3 whenever the
    difference ratio is outside the contraction range where extrapolation
    is safe.
    """
    d1 = v2 - v1
    d2 = v3 - v2
    if d1 == 0.0 or abs(d2) <= 1e-13 * (abs(v3) + 1e-30):
        return v3
    rho = d2 / d1
    if not 0.0 < rho < 0.97:
        return v3
    return v3 + d2 * rho / (1.0 - rho)


def _golden_section(scalar_w, lo, hi):
    """Maximize scalar_w over log-offset in [lo, hi]; returns (t, w, width)."""
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc = scalar_w(c)
    fd = scalar_w(d)
    iters = 0
    while hi - lo > 1e-10 and iters < MAX_REFINE_ITERATIONS:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = scalar_w(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = scalar_w(d)
        iters += 1
    t = c if fc >= fd else d
    return t, max(fc, fd), hi - lo, iters


def _optimize(f, ratio_on, direction, *, max_offset, probes_per_side, positivity):
    """Find the extremum of the ratio over the domain minus the mean.

    ratio_on(side_sign, offsets) must return (ratio, noise) arrays; the
    solver maximizes ``direction * ratio``.  With ``positivity`` set, any
    trusted probe with a non-positive ratio aborts the search, since the
    comparison curve has the wrong sign there.
    """
    candidates = []
    probes = 0
    refinements = 0

    for side_sign, top, unbounded in _sides(f, max_offset):
        offsets = np.geomspace(MIN_OFFSET, top, probes_per_side)
        ratio, noise = ratio_on(side_sign, offsets)
        probes += len(offsets)
        mask = np.abs(ratio) >= TRUST_FACTOR * noise
        t_off = offsets[mask]
        t_ratio = ratio[mask]
        if len(t_off) == 0:
            continue

        if positivity:
            bad = np.nonzero(t_ratio <= 0.0)[0]
            if len(bad):
                i = int(bad[np.argmin(t_ratio[bad])])
                x_bad = f.mu + side_sign * t_off[i]
                raise ConditionViolationError(
                    f"ratio has the wrong sign near x = {x_bad:.6g} "
                    f"(value {t_ratio[i]:.6g}); the declared gap direction "
                    "does not hold for this function"
                )

        w = direction * t_ratio
        side_rank = 0 if side_sign > 0 else 1

        # Limit samples a few grid steps apart extrapolate with a stronger
        # contraction ratio than adjacent ones, which keeps the probe noise
        # amplification of the delta-squared step near unity.
        stride = max(1, min(8, (len(w) - 1) // 2))

        if _diverges(t_off, w, at_start=True):
            candidates.append(_Candidate(math.inf, 0.0, side_rank, None, AT_MU))
        elif len(w) >= 3:
            limit = _aitken(w[2 * stride], w[stride], w[0])
            candidates.append(
                _Candidate(float(limit), 0.0, side_rank, f.mu, AT_MU)
            )
        if unbounded:
            if _diverges(t_off, w, at_start=False):
                candidates.append(
                    _Candidate(math.inf, math.inf, side_rank, None, AT_INFINITY)
                )
            elif len(w) >= 3:
                limit = _aitken(w[-1 - 2 * stride], w[-1 - stride], w[-1])
                candidates.append(
                    _Candidate(float(limit), math.inf, side_rank, None, AT_INFINITY)
                )

        def scalar_w(t, _sign=side_sign):
            r, _ = ratio_on(_sign, np.array([math.exp(t)]))
            return direction * float(r[0])

        is_peak = np.ones(len(w), dtype=bool)
        is_peak[1:] &= w[1:] >= w[:-1]
        is_peak[:-1] &= w[:-1] >= w[1:]
        order = np.nonzero(is_peak)[0]
        order = order[np.argsort(w[order])[::-1][:MAX_BRACKETS]]
        for i in order:
            # The grid value itself stays in as a candidate: golden section
            # never samples the bracket edges, so an extremum attained
            # exactly at a probed point (a domain endpoint, say) would
            # otherwise be lost.
            candidates.append(
                _Candidate(
                    float(w[i]),
                    float(t_off[i]),
                    side_rank,
                    f.mu + side_sign * float(t_off[i]),
                    INTERIOR,
                )
            )
            lo = math.log(t_off[max(i - 1, 0)])
            hi = math.log(t_off[min(i + 1, len(w) - 1)])
            if hi - lo <= 1e-12:
                continue
            t_best, w_best, width, iters = _golden_section(scalar_w, lo, hi)
            refinements += iters
            off_best = math.exp(t_best)
            candidates.append(
                _Candidate(
                    float(w_best),
                    off_best,
                    side_rank,
                    f.mu + side_sign * off_best,
                    INTERIOR,
                    width,
                )
            )

    if not candidates:
        raise DegenerateEnvelopeError(
            "no probe rose above the floating-point noise floor; the ratio "
            "is numerically indistinguishable from zero everywhere"
        )

    w_best = max(c.w for c in candidates)
    if math.isinf(w_best):
        tied = [c for c in candidates if math.isinf(c.w)]
    else:
        tol = max(TIE_TOLERANCE * abs(w_best), 1e-12)
        tied = [c for c in candidates if c.w >= w_best - tol]
    tied.sort(key=lambda c: (c.tie_offset, c.side_rank))
    chosen = tied[0]
    diag = SolverDiagnostics(probes, refinements, chosen.width)
    near_mu = max(
        (abs(c.w) for c in candidates if c.location == AT_MU and math.isfinite(c.w)),
        default=0.0,
    )
    return float(direction * w_best), chosen, diag, float(near_mu)


def _term_sum(offsets, terms, invert):
    total = np.zeros_like(offsets)
    for eta, a in terms:
        total = total + a * offsets ** (-eta if invert else eta)
    return total


def _offset_cap(terms):
    # Keep |x-mu|^eta representable for the largest exponent in play.
    top = max(abs(eta) for eta, _ in terms)
    return min(MAX_OFFSET, 10.0 ** (280.0 / max(top, 1.0)))


def check_terms(terms):
    if not terms:
        raise InvalidParameterError("need at least one comparison term")
    cleaned = []
    seen = set()
    for eta, a in terms:
        eta = float(eta)
        a = float(a)
        if not math.isfinite(eta) or eta < 0:
            raise InvalidParameterError(f"exponent {eta} must be finite and >= 0")
        if not math.isfinite(a) or a <= 0:
            raise InvalidParameterError(f"coefficient {a} must be finite and > 0")
        if eta in seen:
            raise InvalidParameterError(f"duplicate exponent {eta}")
        seen.add(eta)
        cleaned.append((eta, a))
    return tuple(sorted(cleaned))


def _sup_of_abs_ratio(f, terms, *, role, params, validated, probes_per_side):
    """sup over x != mu of |f(x) - f(mu)| / sum_eta a_eta |x - mu|^eta."""
    fmu = evaluate(f, f.mu)

    def ratio_on(side_sign, offsets):
        xs = f.mu + side_sign * offsets
        fx = eval_many(f, xs)
        den = _term_sum(offsets, terms, invert=False)
        return np.abs(fx - fmu) / den, noise_floor(fx, fmu) / den

    value, chosen, diag, _ = _optimize(
        f,
        ratio_on,
        +1.0,
        max_offset=_offset_cap(terms),
        probes_per_side=probes_per_side,
        positivity=False,
    )
    if math.isinf(value):
        raise UnboundedEnvelopeError(
            f"|f - f(mu)| outgrows the comparison curve ({chosen.location}); "
            "no finite constant exists for these exponents"
        )
    return EnvelopeConstant(
        value, chosen.arg, chosen.location, role, f.mu, params, validated, diag
    )


def _inf_of_signed_ratio(f, terms, sign, *, role, params, validated, probes_per_side):
    """inf over x != mu of the signed deviation times sum_eta a_eta |x-mu|^-eta.

    The comparison curve here is the harmonic form 1 / sum a |x-mu|^-eta, so
    dividing by it means multiplying by the sum.
    """
    fmu = evaluate(f, f.mu)
    flip = -1.0 if sign == GAP_BELOW else 1.0

    def ratio_on(side_sign, offsets):
        xs = f.mu + side_sign * offsets
        fx = eval_many(f, xs)
        mult = _term_sum(offsets, terms, invert=True)
        return flip * (fx - fmu) * mult, noise_floor(fx, fmu) * mult

    value, chosen, diag, near_mu = _optimize(
        f,
        ratio_on,
        -1.0,
        max_offset=_offset_cap(terms),
        probes_per_side=probes_per_side,
        positivity=True,
    )
    if value <= DEGENERACY_TOLERANCE * max(near_mu, 1.0):
        raise DegenerateEnvelopeError(
            f"infimum {value:.3g} is indistinguishable from zero; the "
            "resulting lower bound would be vacuous"
        )
    return EnvelopeConstant(
        value, chosen.arg, chosen.location, role, f.mu, params, validated, diag
    )


def sup_ratio_upper(f, alpha, n, *, validate=True,
                    probes_per_side=DEFAULT_PROBES_PER_SIDE):
    """Smallest M with |f(x) - f(mu)| <= M (|x-mu|^alpha + |x-mu|^n).

    With ``validate`` the declared growth is first checked empirically:
    f - f(mu) must be O(|x-mu|^alpha) near the mean and O(|x-mu|^n) far
    away, otherwise no finite M exists and the check reports where the
    ratio escapes.
    """
    decl = GrowthDeclaration("upper", alpha=float(alpha), n=float(n))
    validated = False
    if validate:
        report = validate_growth(f, decl)
        if not report.passed:
            raise UnboundedEnvelopeError(report.message)
        validated = True
    terms = ((float(alpha), 1.0), (float(n), 1.0))
    params = (("alpha", float(alpha)), ("n", float(n)))
    return _sup_of_abs_ratio(
        f, terms, role="upper_sup", params=params, validated=validated,
        probes_per_side=probes_per_side,
    )


def inf_ratio_lower(f, alpha, beta, sign=GAP_ABOVE, *, validate=True,
                    probes_per_side=DEFAULT_PROBES_PER_SIDE):
    """Largest M with the signed deviation >= M / (|x-mu|^-beta + |x-mu|^-alpha).

    ``sign`` declares the gap direction: with ``gap_above`` the deviation is
    f(x) - f(mu) (convex-like case), with ``gap_below`` it is f(mu) - f(x).
    A trusted probe of the wrong sign raises ConditionViolationError; an
    infimum indistinguishable from zero raises DegenerateEnvelopeError.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not 0.0 <= beta <= alpha or alpha <= 0:
        raise InvalidParameterError(
            f"need 0 <= beta <= alpha with alpha > 0, got beta={beta} alpha={alpha}"
        )
    if sign not in (GAP_ABOVE, GAP_BELOW):
        raise InvalidParameterError(f"unknown gap sign {sign!r}")
    decl = GrowthDeclaration("lower", alpha=alpha, beta=beta, sign=sign)
    validated = False
    if validate:
        report = validate_growth(f, decl)
        if not report.passed:
            raise ConditionViolationError(report.message)
        validated = True
    if beta == alpha:
        # |t|^-beta + |t|^-alpha collapses to 2 |t|^-alpha.
        terms = ((alpha, 2.0),)
    else:
        terms = ((beta, 1.0), (alpha, 1.0))
    params = (("alpha", alpha), ("beta", beta), ("sign", sign))
    return _inf_of_signed_ratio(
        f, terms, sign, role="lower_inf", params=params, validated=validated,
        probes_per_side=probes_per_side,
    )


def curvature_envelope(f, *, probes_per_side=DEFAULT_PROBES_PER_SIDE):
    """Extrema of h(x) = (f(x) - f(mu) - f'(mu)(x - mu)) / (x - mu)^2.

    Returns (inf_constant, sup_constant).  Either side may legitimately be
    infinite; that is reported as a value of +/-inf with the escape location,
    not as an error, since the other side can still give a one-sided bound.
    """
    slope = select_shift_slope(f)
    fmu = evaluate(f, f.mu)

    def ratio_on(side_sign, offsets):
        xs = f.mu + side_sign * offsets
        fx = eval_many(f, xs)
        num = fx - fmu - slope * side_sign * offsets
        noise = noise_floor(fx, fmu) + 16.0 * EPS * abs(slope) * offsets
        den = offsets ** 2
        return num / den, noise / den

    cap = _offset_cap(((2.0, 1.0),))
    params = (("slope", float(slope)),)
    out = []
    for direction, role in ((-1.0, "curvature_inf"), (+1.0, "curvature_sup")):
        value, chosen, diag, _ = _optimize(
            f,
            ratio_on,
            direction,
            max_offset=cap,
            probes_per_side=probes_per_side,
            positivity=False,
        )
        out.append(
            EnvelopeConstant(
                value, chosen.arg, chosen.location, role, f.mu, params, True, diag
            )
        )
    return tuple(out)


def sup_ratio_general(f, terms, mode, sign=GAP_ABOVE, *, validate=True,
                      probes_per_side=DEFAULT_PROBES_PER_SIDE):
    """Envelope constant against a user-supplied power sum.

    ``terms`` is a sequence of (exponent, coefficient) pairs defining
    t(x) = sum a_eta |x - mu|^eta.  With mode "sup" this returns
    sup |f - f(mu)| / t; with mode "inf" the comparison curve is the
    harmonic form 1 / sum a_eta |x - mu|^-eta and the signed infimum is
    returned, exactly as in the two specialized operations.
    """
    terms = check_terms(terms)
    etas = [eta for eta, _ in terms]
    params = tuple(
        [("terms", tuple(terms)), ("mode", mode)]
        + ([("sign", sign)] if mode == "inf" else [])
    )
    if mode == "sup":
        if min(etas) <= 0:
            raise InvalidParameterError("sup mode needs strictly positive exponents")
        decl = GrowthDeclaration("upper", alpha=min(etas), n=max(etas))
        validated = False
        if validate:
            report = validate_growth(f, decl)
            if not report.passed:
                raise UnboundedEnvelopeError(report.message)
            validated = True
        return _sup_of_abs_ratio(
            f, terms, role="general_sup", params=params, validated=validated,
            probes_per_side=probes_per_side,
        )
    if mode == "inf":
        if sign not in (GAP_ABOVE, GAP_BELOW):
            raise InvalidParameterError(f"unknown gap sign {sign!r}")
        decl = GrowthDeclaration(
            "lower", alpha=max(etas), beta=min(etas), sign=sign
        )
        validated = False
        if validate:
            report = validate_growth(f, decl)
            if not report.passed:
                raise ConditionViolationError(report.message)
            validated = True
        return _inf_of_signed_ratio(
            f, terms, sign, role="general_inf", params=params, validated=validated,
            probes_per_side=probes_per_side,
        )
    raise InvalidParameterError(f"mode must be 'sup' or 'inf', got {mode!r}")

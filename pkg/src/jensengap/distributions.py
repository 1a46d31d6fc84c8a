"""Distributions and their absolute centered moments sigma_p = (E|X - mu|^p)^(1/p).

Every moment-based gap bound in this package is a function of these sigma_p,
so the moment path is kept honest three ways: discrete families use exactly
rounded sums, the named continuous families use closed forms (cross-checked
against quadrature in the tests), and sampling families use seeded Monte
Carlo with a CLT error bar.

Convention: |t|^0 is 1 for every t, including t = 0, so sigma_0 = 1 always.
This keeps the k-term denominators of the lower bounds finite without
special cases.

Each distribution also knows how to take a plain expectation E[g(X)]
(``expect``), which is the computational core of the gap oracle: exact
summation where the support is finite, adaptive Gauss-Kronrod quadrature
with a certified truncation remainder for the named densities, Monte Carlo
for averaged families.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .errors import EvaluationError, InvalidParameterError
from .functions import Interval
from .rng import resolve_seed, stream

PROB_SUM_TOL = 1e-12
DEFAULT_NODES = 2048
DEFAULT_MOMENT_SAMPLES = 100_000
DEFAULT_GAP_SAMPLES = 1_000_000
CLT_FACTOR = 1.96
# quadrature truncation: grow T until the analytic tail bound is below this
# fraction of the integral
TAIL_REL_TOL = 1e-12
_CHUNK = 1 << 24  # base draws per chunk when averaging, to bound memory


class Expectation(NamedTuple):
    value: float
    abs_error: float
    method: str
    count: int


@dataclass(frozen=True)
class MomentValue:
    """One absolute centered moment, with provenance.

    ``abs_error_estimate`` applies to ``sigma_p_pow`` (the directly computed
    quantity E|X - mu|^p); sigma_p is its p-th root.
    """

    p: float
    sigma_p: float
    sigma_p_pow: float
    method: str
    abs_error_estimate: float

    def to_dict(self):
        return {"p": self.p, "sigma_p": self.sigma_p, "sigma_p_pow": self.sigma_p_pow,
                "method": self.method, "abs_error_estimate": self.abs_error_estimate}


def _moment(p, pow_value, method, abs_error):
    if p == 0:
        return MomentValue(0.0, 1.0, 1.0, method, 0.0)
    root = pow_value ** (1.0 / p) if pow_value > 0 else 0.0
    return MomentValue(float(p), root, float(pow_value), method, float(abs_error))


def _check_order(p):
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= 0):
        raise InvalidParameterError(f"moment order must be a finite real >= 0, got {p}")
    return float(p)


def _apply(g, xs):
    """Apply a scalar-or-vector callable to an array of points."""
    try:
        vals = np.asarray(g(xs), dtype=float)
        if vals.shape != xs.shape:
            raise ValueError
    except Exception:
        vals = np.array([float(g(x)) for x in xs])
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("non-finite function value inside the support")
    return vals


class Distribution(ABC):
    """Common surface: mean, moments, sampling, and expectations."""

    variant = "abstract"

    @abstractmethod
    def mean(self):
        ...

    @abstractmethod
    def support_interval(self):
        """Smallest closed interval containing the support."""

    @abstractmethod
    def sample(self, count, seed=None, *, purpose="sample"):
        ...

    @abstractmethod
    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        """E[g(X)] as an Expectation tuple."""

    @abstractmethod
    def to_dict(self):
        ...

    def abs_central_moment(self, p, method="auto", seed=None,
                           samples=DEFAULT_MOMENT_SAMPLES, nodes=DEFAULT_NODES):
        """sigma_p as a MomentValue.  ``method`` picks the route:

        "auto" uses the best available (exact sums, closed forms, Monte
        Carlo for averaged families); "quadrature" and "monte_carlo" force
        those routes where they make sense, mainly for cross-checking.
        """
        p = _check_order(p)
        if p == 0:
            return _moment(0.0, 1.0, "closed_form", 0.0)
        return self._moment_pow(p, method, seed, samples, nodes)

    @abstractmethod
    def _moment_pow(self, p, method, seed, samples, nodes):
        ...

    def _moment_monte_carlo(self, p, seed, samples):
        mu = self.mean()
        # one shared batch per (dist, seed) across all orders p, so empirical
        # moment inequalities hold exactly for the estimates
        draws = self.sample(samples, seed, purpose="moments")
        powed = np.abs(draws - mu) ** p
        est = float(np.mean(powed))
        err = CLT_FACTOR * float(np.std(powed)) / math.sqrt(len(powed))
        return _moment(p, est, "monte_carlo", err)


# ---------------------------------------------------------------------------
# Finite support

def _validate_points(points):
    cleaned = []
    for x, q in points:
        x, q = float(x), float(q)
        if not (math.isfinite(x) and math.isfinite(q)):
            raise InvalidParameterError("support points and probabilities must be finite")
        if q <= 0:
            raise InvalidParameterError(f"probabilities must be positive, got {q} at x = {x}")
        cleaned.append((x, q))
    cleaned.sort()
    xs = [x for x, _ in cleaned]
    if len(set(xs)) != len(xs):
        raise InvalidParameterError("support points must be distinct")
    total = math.fsum(q for _, q in cleaned)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvalidParameterError(f"probabilities sum to {total!r}, not 1")
    return tuple(cleaned)


@dataclass(frozen=True)
class Discrete(Distribution):
    points: tuple

    variant = "discrete"

    def __post_init__(self):
        object.__setattr__(self, "points", _validate_points(self.points))

    def mean(self):
        return math.fsum(x * q for x, q in self.points)

    def support_interval(self):
        return Interval(self.points[0][0], self.points[-1][0])

    def sample(self, count, seed=None, *, purpose="sample"):
        rng = stream(resolve_seed(seed), purpose)
        xs = np.array([x for x, _ in self.points])
        qs = np.array([q for _, q in self.points])
        return rng.choice(xs, size=int(count), p=qs / qs.sum())

    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        vals = _apply(g, np.array([x for x, _ in self.points]))
        total = math.fsum(q * v for (_, q), v in zip(self.points, vals))
        return Expectation(total, 0.0, "exact_sum", len(self.points))

    def _moment_pow(self, p, method, seed, samples, nodes):
        if method == "monte_carlo":
            return self._moment_monte_carlo(p, seed, samples)
        if method not in ("auto", "exact_sum"):
            raise InvalidParameterError(f"unsupported moment method {method!r} for {self.variant}")
        mu = self.mean()
        pow_value = math.fsum(q * abs(x - mu) ** p for x, q in self.points)
        return _moment(p, pow_value, "exact_sum", 0.0)

    def to_dict(self):
        return {"variant": "discrete", "points": [[x, q] for x, q in self.points]}


@dataclass(frozen=True)
class Empirical(Distribution):
    """Uniform weight on an observed sample; moments are plug-in sums."""

    samples: tuple

    variant = "empirical"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.samples)
        if len(vals) == 0:
            raise InvalidParameterError("empirical distribution needs at least one sample")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameterError("samples must be finite")
        object.__setattr__(self, "samples", vals)

    def mean(self):
        return math.fsum(self.samples) / len(self.samples)

    def support_interval(self):
        return Interval(min(self.samples), max(self.samples))

    def sample(self, count, seed=None, *, purpose="sample"):
        rng = stream(resolve_seed(seed), purpose)
        return rng.choice(np.asarray(self.samples), size=int(count))

    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        vals = _apply(g, np.asarray(self.samples))
        total = math.fsum(vals) / len(self.samples)
        return Expectation(total, 0.0, "exact_sum", len(self.samples))

    def _moment_pow(self, p, method, seed, samples, nodes):
        if method == "monte_carlo":
            return self._moment_monte_carlo(p, seed, samples)
        if method not in ("auto", "exact_sum"):
            raise InvalidParameterError(f"unsupported moment method {method!r} for {self.variant}")
        mu = self.mean()
        pow_value = math.fsum(abs(v - mu) ** p for v in self.samples) / len(self.samples)
        return _moment(p, pow_value, "exact_sum", 0.0)

    def to_dict(self):
        return {"variant": "empirical", "samples": list(self.samples)}


# ---------------------------------------------------------------------------
# Named continuous families

class _NamedContinuous(Distribution):
    """Shared quadrature-with-certified-tail machinery.

    The integral E[g(X)] is taken over [mean - T, mean + T] by adaptive
    Gauss-Kronrod quadrature; T grows until an analytic bound on the
    discarded tail drops below TAIL_REL_TOL of the integral.  The tail bound
    fits |g(x)| <= C (1 + |x - mean|^k) from probes beyond T (or from
    ``growth_hint`` when the caller knows k) and then applies Cauchy-Schwarz
    against the family's closed-form moments, all in log space so extreme
    parameters cannot overflow.
    """

    def _scale(self):
        raise NotImplementedError

    def _pdf(self, x):
        raise NotImplementedError

    def _log_tail_mass(self, t_offset):
        """log P(|X - mean| > t_offset)."""
        raise NotImplementedError

    def _log_abs_moment_pow(self, p):
        """log E|X - mean|^p."""
        raise NotImplementedError

    def _fit_growth(self, g, t_offset, growth_hint):
        mu = self.mean()
        offs = t_offset * np.geomspace(1.0, 4.0, 5)
        xs = np.concatenate([mu + offs, mu - offs])
        vals = np.abs(_apply(g, xs))
        if growth_hint is not None:
            k = float(growth_hint)
        else:
            logs = np.log(np.maximum(vals, 1e-300))
            span = np.log(offs[-1] / offs[0])
            k = max((logs[4] - logs[0]) / span, (logs[9] - logs[5]) / span, 0.0)
            k = min(max(k * 1.5, 0.0), 60.0)
        c = 2.0 * float(np.max(vals / (1.0 + np.abs(xs - mu) ** k)))
        return max(c, 1e-300), k

    def _log_tail_bound(self, g, t_offset, growth_hint):
        c, k = self._fit_growth(g, t_offset, growth_hint)
        log_mass = self._log_tail_mass(t_offset)
        # E[|g| ; tail] <= C (P(tail) + sqrt(E|X-m|^(2k)) sqrt(P(tail)))
        log_cs = 0.5 * self._log_abs_moment_pow(2.0 * k) + 0.5 * log_mass
        return math.log(c) + np.logaddexp(log_mass, log_cs)

    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        mu = self.mean()
        limit = max(50, int(nodes) // 21)
        t_offset = 12.0 * self._scale()
        for _ in range(16):
            integrand = lambda x: float(g(x)) * self._pdf(x)
            value, quad_err, info = integrate.quad(
                integrand, mu - t_offset, mu + t_offset,
                points=[mu], limit=limit, full_output=1)
            log_tail = self._log_tail_bound(g, t_offset, growth_hint)
            tol = TAIL_REL_TOL * max(abs(value), 1e-6)
            if log_tail <= math.log(tol):
                tail = math.exp(log_tail)
                return Expectation(float(value), float(quad_err) + tail,
                                   "quadrature", int(info["neval"]))
            t_offset *= 1.6
        raise EvaluationError("tail bound did not certify; the integrand grows too fast")

    def _moment_pow(self, p, method, seed, samples, nodes):
        if method in ("auto", "closed_form"):
            return _moment(p, math.exp(self._log_abs_moment_pow(p)), "closed_form", 0.0)
        if method == "quadrature":
            mu = self.mean()
            est = self.expect(lambda x: abs(x - mu) ** p, nodes=nodes, growth_hint=p)
            return _moment(p, est.value, "quadrature", est.abs_error)
        if method == "monte_carlo":
            return self._moment_monte_carlo(p, seed, samples)
        raise InvalidParameterError(f"unsupported moment method {method!r} for {self.variant}")


@dataclass(frozen=True)
class Gaussian(_NamedContinuous):
    mean_value: float
    stddev: float

    variant = "gaussian"

    def __post_init__(self):
        if not (math.isfinite(self.mean_value) and self.stddev > 0):
            raise InvalidParameterError("gaussian needs a finite mean and stddev > 0")

    def mean(self):
        return self.mean_value

    def support_interval(self):
        return Interval()

    def _scale(self):
        return self.stddev

    def _pdf(self, x):
        z = (x - self.mean_value) / self.stddev
        return math.exp(-0.5 * z * z) / (self.stddev * math.sqrt(2.0 * math.pi))

    def _log_tail_mass(self, t_offset):
        u = t_offset / (self.stddev * math.sqrt(2.0))
        if u < 25.0:
            return math.log(max(float(erfc(u)), 1e-300))
        return -u * u - math.log(u * math.sqrt(math.pi))

    def _log_abs_moment_pow(self, p):
        # E|X - m|^p = s^p 2^(p/2) Gamma((p+1)/2) / sqrt(pi)
        return (p * math.log(self.stddev) + 0.5 * p * math.log(2.0)
                + math.lgamma((p + 1.0) / 2.0) - 0.5 * math.log(math.pi))

    def sample(self, count, seed=None, *, purpose="sample"):
        rng = stream(resolve_seed(seed), purpose)
        return rng.normal(self.mean_value, self.stddev, size=int(count))

    def to_dict(self):
        return {"variant": "gaussian", "mean": self.mean_value, "stddev": self.stddev}


@dataclass(frozen=True)
class Laplace(_NamedContinuous):
    mean_value: float
    scale: float

    variant = "laplace"

    def __post_init__(self):
        if not (math.isfinite(self.mean_value) and self.scale > 0):
            raise InvalidParameterError("laplace needs a finite mean and scale > 0")

    def mean(self):
        return self.mean_value

    def support_interval(self):
        return Interval()

    def _scale(self):
        return self.scale

    def _pdf(self, x):
        return math.exp(-abs(x - self.mean_value) / self.scale) / (2.0 * self.scale)

    def _log_tail_mass(self, t_offset):
        return -t_offset / self.scale

    def _log_abs_moment_pow(self, p):
        # |X - m| is exponential with mean `scale`: E|X - m|^p = scale^p Gamma(p+1)
        return p * math.log(self.scale) + math.lgamma(p + 1.0)

    def sample(self, count, seed=None, *, purpose="sample"):
        rng = stream(resolve_seed(seed), purpose)
        return rng.laplace(self.mean_value, self.scale, size=int(count))

    def to_dict(self):
        return {"variant": "laplace", "mean": self.mean_value, "scale": self.scale}


@dataclass(frozen=True)
class Uniform(_NamedContinuous):
    lo: float
    hi: float

    variant = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise InvalidParameterError("uniform needs finite lo < hi")

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def support_interval(self):
        return Interval(self.lo, self.hi)

    def _scale(self):
        return 0.5 * (self.hi - self.lo)

    def _pdf(self, x):
        return 1.0 / (self.hi - self.lo) if self.lo <= x <= self.hi else 0.0

    def _log_tail_mass(self, t_offset):
        return -math.inf if t_offset >= self._scale() else 0.0

    def _log_abs_moment_pow(self, p):
        # |X - mean| is uniform on [0, half-width]
        return p * math.log(self._scale()) - math.log1p(p)

    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        # bounded support: integrate it exactly, no tail to certify
        mu = self.mean()
        limit = max(50, int(nodes) // 21)
        w = 1.0 / (self.hi - self.lo)
        value, quad_err, info = integrate.quad(
            lambda x: float(g(x)) * w, self.lo, self.hi,
            points=[mu], limit=limit, full_output=1)
        return Expectation(float(value), float(quad_err), "quadrature", int(info["neval"]))

    def sample(self, count, seed=None, *, purpose="sample"):
        rng = stream(resolve_seed(seed), purpose)
        return rng.uniform(self.lo, self.hi, size=int(count))

    def to_dict(self):
        return {"variant": "uniform", "lo": self.lo, "hi": self.hi}


# ---------------------------------------------------------------------------
# Mean of n independent copies

@dataclass(frozen=True)
class MeanOfN(Distribution):
    """Distribution of the average of n independent draws from ``base``.

    No closed form is attempted: moments and expectations are seeded Monte
    Carlo with CLT error bars.  The exact mean is inherited from the base,
    so the oracle's f(E[X]) term stays exact.
    """

    base: Distribution
    n: int

    variant = "mean_of_n"

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise InvalidParameterError(f"n must be a positive integer, got {self.n}")

    def mean(self):
        return self.base.mean()

    def support_interval(self):
        return self.base.support_interval()

    def sample(self, count, seed=None, *, purpose="sample"):
        count = int(count)
        seed = resolve_seed(seed)
        out = np.empty(count)
        rows_per_chunk = max(1, _CHUNK // self.n)
        done, chunk = 0, 0
        # chunked so count * n base draws never balloon memory; each chunk
        # draws from its own derived stream, so results are reproducible and
        # chunk boundaries depend only on (count, n)
        while done < count:
            take = min(rows_per_chunk, count - done)
            block = self.base.sample(take * self.n, seed, purpose=f"{purpose}/base/{chunk}")
            out[done:done + take] = block.reshape(take, self.n).mean(axis=1)
            done += take
            chunk += 1
        return out

    def expect(self, g, *, nodes=DEFAULT_NODES, samples=DEFAULT_GAP_SAMPLES,
               seed=None, growth_hint=None):
        draws = self.sample(int(samples), seed, purpose="gap")
        vals = _apply(g, draws)
        est = float(np.mean(vals))
        err = CLT_FACTOR * float(np.std(vals)) / math.sqrt(len(vals))
        return Expectation(est, err, "monte_carlo", len(vals))

    def _moment_pow(self, p, method, seed, samples, nodes):
        if method not in ("auto", "monte_carlo"):
            raise InvalidParameterError(f"unsupported moment method {method!r} for {self.variant}")
        return self._moment_monte_carlo(p, seed, samples)

    def to_dict(self):
        return {"variant": "mean_of_n", "base": self.base.to_dict(), "n": self.n}


# ---------------------------------------------------------------------------
# Constructions

def two_point(mu, sigma):
    """Mass 1/2 at mu - sigma and mu + sigma: sigma_p = sigma for every p > 0."""
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    return Discrete(((mu - sigma, 0.5), (mu + sigma, 0.5)))


def three_point(mu, a, p):
    """Mass 1 - p at mu and p/2 at mu +- a: sigma_b = p^(1/b) a."""
    if not 0 < p <= 1:
        raise InvalidParameterError(f"p must lie in (0, 1], got {p}")
    if not a > 0:
        raise InvalidParameterError(f"a must be positive, got {a}")
    if p == 1:
        return two_point(mu, a)
    return Discrete(((mu - a, p / 2.0), (mu, 1.0 - p), (mu + a, p / 2.0)))


def symmetric_outlier(j, m):
    """Mass 1 - j^-m at 0 and j^-m/2 at -j and +j.

    For r <= m the moments sigma_r = j^(1 - m/r) are non-increasing in j
    while the gap of a slowly growing function decays like j^-m; these are
    the witnesses showing which moment orders can certify a lower bound.
    """
    if not (j >= 1 and m > 0):
        raise InvalidParameterError(f"need j >= 1 and m > 0, got j={j}, m={m}")
    weight = float(j) ** (-float(m))
    if weight >= 1.0:
        return two_point(0.0, float(j))
    return Discrete(((-float(j), weight / 2.0), (0.0, 1.0 - weight), (float(j), weight / 2.0)))


def mean_of_n(base, n):
    return MeanOfN(base, int(n))


def distribution_from_dict(d):
    """Parse the JSON descriptor form of a distribution."""
    if not isinstance(d, dict) or "variant" not in d:
        raise InvalidParameterError("distribution descriptor must be an object with a 'variant' key")
    v = d["variant"]
    try:
        if v == "discrete":
            return Discrete(tuple((float(x), float(q)) for x, q in d["points"]))
        if v == "gaussian":
            return Gaussian(float(d["mean"]), float(d["stddev"]))
        if v == "laplace":
            return Laplace(float(d["mean"]), float(d["scale"]))
        if v == "uniform":
            return Uniform(float(d["lo"]), float(d["hi"]))
        if v == "empirical":
            return Empirical(tuple(float(s) for s in d["samples"]))
        if v == "mean_of_n":
            return MeanOfN(distribution_from_dict(d["base"]), int(d["n"]))
        if v == "two_point":
            return two_point(float(d["mu"]), float(d["sigma"]))
        if v == "three_point":
            return three_point(float(d["mu"]), float(d["a"]), float(d["p"]))
        if v == "symmetric_outlier":
            return symmetric_outlier(float(d["j"]), float(d["m"]))
    except KeyError as exc:
        raise InvalidParameterError(f"distribution descriptor for {v!r} is missing {exc}") from None
    raise InvalidParameterError(f"unknown distribution variant {v!r}")

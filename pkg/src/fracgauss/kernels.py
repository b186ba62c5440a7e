"""Closed-form variance/covariance kernels for the supported process
families, plus memory-class and local-regularity predicates.

Two printed formulas are corrected here (the quadrature oracle module is
the arbiter, see the oracle tests):

* the one-sided multifractional kernel uses the exponent H(t)-1/2 on t
  and the normalization (H(s)+1/2)Γ(H(s)+1/2)Γ(H(t)+1/2), which is the
  unique choice consistent with the moving-average construction and with
  the constant-H reduction;
* the one-sided multifractional Ornstein-Uhlenbeck kernel is normalized
  by Γ(α(t))Γ(α(s)+1) (the two forms coincide at constant α).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import (
    DomainError,
    bessel_k,
    gamma_fn,
    gauss_2f1,
    humbert_phi1,
    lower_incomplete_gamma,
    one_f_two,
    tricomi_psi,
)

__all__ = [
    "OrderingError", "UnsupportedParameterError", "ModelInconsistencyWarning",
    "TimeFunction", "HurstFunction", "AlphaFunction",
    "FBM", "RLFBM", "MBM", "RLMBM", "WeylFOU", "RLFOU", "WeylMOU", "RLMOU",
    "FRBM", "MRBM", "GC", "MemoryClass",
    "fbm_sigma2", "fbm_cov", "fbm_increment_cov", "rl_fbm_cov", "rl_mbm_cov",
    "weyl_fou_var", "weyl_fou_cov", "rl_fou_var", "rl_fou_cov",
    "weyl_mou_cov", "rl_mou_cov", "frbm_spectral_density", "frbm_cov",
    "gc_cov", "mrbm_cov", "cov", "var", "cov_matrix",
    "memory_class", "tangent_index", "local_dimension",
    "spec_from_dict", "spec_to_dict",
]


class OrderingError(ValueError):
    """Two-time kernel called with arguments out of its s <= t order."""


class UnsupportedParameterError(ValueError):
    """Parameters land on (or too near) a pole of the closed form."""


class ModelInconsistencyWarning(UserWarning):
    """A reported local index falls outside the admissible range (0,1)."""


# ---------------------------------------------------------------------------
# exponent functions H(t), alpha(t), gamma(t)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeFunction:
    """Constant / linear / tabulated exponent function of time.

    linear(h0, h1, t0, t1) interpolates on [t0, t1] and holds the endpoint
    value outside; tabulated knots are piecewise linear with the same
    endpoint extension.  Piecewise linearity puts all extrema at knots,
    so range invariants are checked exactly at construction.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        # subclasses override with range validation
        if self.kind not in ("constant", "linear", "tabulated"):
            raise DomainError(f"unknown TimeFunction kind {self.kind!r}")

    @classmethod
    def constant(cls, value):
        return cls("constant", (float(value),))

    @classmethod
    def linear(cls, v0, v1, t0, t1):
        if not t1 > t0:
            raise DomainError(f"linear TimeFunction requires t1 > t0, got [{t0}, {t1}]")
        return cls("linear", (float(v0), float(v1), float(t0), float(t1)))

    @classmethod
    def tabulated(cls, knots):
        knots = tuple((float(t), float(v)) for t, v in knots)
        if len(knots) < 2:
            raise DomainError("tabulated TimeFunction needs at least 2 knots")
        times = [t for t, _ in knots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("tabulated knots must be strictly increasing in time")
        return cls("tabulated", knots)

    @property
    def is_constant(self):
        return self.kind == "constant"

    def __call__(self, t):
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "linear":
            v0, v1, t0, t1 = self.params
            tt = min(max(t, t0), t1)
            return v0 + (v1 - v0) * (tt - t0) / (t1 - t0)
        times = np.array([k[0] for k in self.params])
        vals = np.array([k[1] for k in self.params])
        return float(np.interp(t, times, vals))

    def knot_values(self):
        if self.kind == "constant":
            return (self.params[0],)
        if self.kind == "linear":
            return self.params[:2]
        return tuple(v for _, v in self.params)

    def bounds(self):
        vals = self.knot_values()
        return min(vals), max(vals)

    def to_dict(self):
        if self.kind == "constant":
            return {"form": "constant", "value": self.params[0]}
        if self.kind == "linear":
            v0, v1, t0, t1 = self.params
            return {"form": "linear", "v0": v0, "v1": v1, "t0": t0, "t1": t1}
        return {"form": "tabulated", "knots": [list(k) for k in self.params]}

    @classmethod
    def from_dict(cls, d):
        form = d["form"]
        if form == "constant":
            return cls.constant(d["value"])
        if form == "linear":
            return cls.linear(d["v0"], d["v1"], d["t0"], d["t1"])
        if form == "tabulated":
            return cls.tabulated(d["knots"])
        raise DomainError(f"unknown TimeFunction form {form!r}")


def _validate_range(fn, lo, hi, lo_open, hi_open, what):
    vmin, vmax = fn.bounds()
    lo_ok = vmin > lo if lo_open else vmin >= lo
    hi_ok = vmax < hi if hi_open else vmax <= hi
    if not (lo_ok and hi_ok):
        raise DomainError(
            f"{what} must take values in {'(' if lo_open else '['}{lo}, "
            f"{hi}{')' if hi_open else ']'}; got range [{vmin}, {vmax}]")


class HurstFunction(TimeFunction):
    """TimeFunction constrained to 0 < H(t) < 1."""

    def __post_init__(self):
        super().__post_init__()
        _validate_range(self, 0.0, 1.0, True, True, "Hurst function")


class AlphaFunction(TimeFunction):
    """TimeFunction constrained to alpha(t) > 1/2 (finite variance)."""

    def __post_init__(self):
        super().__post_init__()
        _validate_range(self, 0.5, math.inf, True, True, "alpha function")


def as_hurst(x) -> HurstFunction:
    if isinstance(x, HurstFunction):
        return x
    if isinstance(x, TimeFunction):
        return HurstFunction(x.kind, x.params)
    return HurstFunction("constant", (float(x),))


def as_alpha(x) -> AlphaFunction:
    if isinstance(x, AlphaFunction):
        return x
    if isinstance(x, TimeFunction):
        return AlphaFunction(x.kind, x.params)
    return AlphaFunction("constant", (float(x),))


def as_timefn(x) -> TimeFunction:
    if isinstance(x, TimeFunction):
        return TimeFunction(x.kind, x.params)
    return TimeFunction.constant(float(x))


# ---------------------------------------------------------------------------
# process specifications
# ---------------------------------------------------------------------------

def _check(cond, msg):
    if not cond:
        raise DomainError(msg)


@dataclass(frozen=True)
class FBM:
    """Two-sided fractional Brownian motion, constant Hurst index."""
    hurst: float
    family = "fbm"

    def __post_init__(self):
        _check(0.0 < self.hurst < 1.0, f"FBM requires 0 < H < 1, got {self.hurst}")


@dataclass(frozen=True)
class RLFBM:
    """One-sided fractional Brownian motion (fractional integral from 0)."""
    hurst: float
    family = "rlfbm"

    def __post_init__(self):
        _check(0.0 < self.hurst < 1.0, f"RLFBM requires 0 < H < 1, got {self.hurst}")


@dataclass(frozen=True)
class MBM:
    """Multifractional Brownian motion (moving-average construction)."""
    hurst: HurstFunction
    family = "mbm"

    def __post_init__(self):
        object.__setattr__(self, "hurst", as_hurst(self.hurst))


@dataclass(frozen=True)
class RLMBM:
    """One-sided multifractional Brownian motion."""
    hurst: HurstFunction
    family = "rlmbm"

    def __post_init__(self):
        object.__setattr__(self, "hurst", as_hurst(self.hurst))


@dataclass(frozen=True)
class WeylFOU:
    """Stationary fractional Ornstein-Uhlenbeck process."""
    alpha: float
    omega: float
    family = "weylfou"

    def __post_init__(self):
        _check(self.alpha > 0.5, f"WeylFOU requires alpha > 1/2, got {self.alpha}")
        _check(self.omega > 0.0, f"WeylFOU requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class RLFOU:
    """Fractional Ornstein-Uhlenbeck process started at 0."""
    alpha: float
    omega: float
    family = "rlfou"

    def __post_init__(self):
        _check(self.alpha > 0.5, f"RLFOU requires alpha > 1/2, got {self.alpha}")
        _check(self.omega > 0.0, f"RLFOU requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class WeylMOU:
    """Multifractional Ornstein-Uhlenbeck process, two-sided kernel."""
    alpha: AlphaFunction
    omega: float
    family = "weylmou"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        _check(self.omega > 0.0, f"WeylMOU requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class RLMOU:
    """Multifractional Ornstein-Uhlenbeck process started at 0."""
    alpha: AlphaFunction
    omega: float
    family = "rlmou"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        _check(self.omega > 0.0, f"RLMOU requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class FRBM:
    """Fractional Riesz-Bessel motion: spectral density
    (2π)^{-1} |k|^{-2γ} (ω²+k²)^{-α}."""
    alpha: float
    gamma: float
    omega: float
    family = "frbm"

    def __post_init__(self):
        _check(self.alpha >= 0.0, f"FRBM requires alpha >= 0, got {self.alpha}")
        _check(0.0 <= self.gamma < 0.5,
               f"FRBM requires 0 <= gamma < 1/2, got {self.gamma}")
        _check(self.alpha + self.gamma > 0.5,
               f"FRBM requires alpha + gamma > 1/2, got {self.alpha + self.gamma}")
        _check(self.omega > 0.0, f"FRBM requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class MRBM:
    """Multifractional Riesz-Bessel motion; pointwise FRBM constraints."""
    alpha: TimeFunction
    gamma: TimeFunction
    omega: float
    family = "mrbm"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_timefn(self.alpha))
        object.__setattr__(self, "gamma", as_timefn(self.gamma))
        amin, _ = self.alpha.bounds()
        gmin, gmax = self.gamma.bounds()
        _check(amin >= 0.0, "MRBM requires alpha(t) >= 0")
        _check(gmin >= 0.0 and gmax < 0.5, "MRBM requires 0 <= gamma(t) < 1/2")
        # alpha+gamma > 1/2 pointwise: piecewise linear, so knots suffice
        for t in _knot_union(self.alpha, self.gamma):
            _check(self.alpha(t) + self.gamma(t) > 0.5,
                   f"MRBM requires alpha(t)+gamma(t) > 1/2; violated at t={t}")
        _check(self.omega > 0.0, f"MRBM requires omega > 0, got {self.omega}")


@dataclass(frozen=True)
class GC:
    """Stationary Gaussian process with generalized Cauchy covariance."""
    alpha: float
    beta: float
    family = "gc"

    def __post_init__(self):
        _check(0.0 < self.alpha <= 2.0, f"GC requires 0 < alpha <= 2, got {self.alpha}")
        _check(self.beta > 0.0, f"GC requires beta > 0, got {self.beta}")


_FAMILIES = {c.family: c for c in
             (FBM, RLFBM, MBM, RLMBM, WeylFOU, RLFOU, WeylMOU, RLMOU, FRBM, MRBM, GC)}

STATIONARY_FAMILIES = ("weylfou", "gc", "frbm")
ZERO_START_FAMILIES = ("rlfbm", "rlmbm", "rlfou", "rlmou", "mbm")


def spec_to_dict(spec) -> dict:
    out = {"process": spec.family}
    for name, val in vars(spec).items():
        out[name] = val.to_dict() if isinstance(val, TimeFunction) else val
    return out


def spec_from_dict(d: dict):
    d = dict(d)
    family = d.pop("process")
    if family not in _FAMILIES:
        raise DomainError(f"unknown process family {family!r}")
    cls = _FAMILIES[family]
    kwargs = {}
    for name, val in d.items():
        kwargs[name] = TimeFunction.from_dict(val) if isinstance(val, dict) else val
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# fractional Brownian motion (two-sided)
# ---------------------------------------------------------------------------

def fbm_sigma2(H: float) -> float:
    """Variance of the moving-average FBM at t=1:

        σ_H² = Γ(1-2H) cos(πH) / (πH)

    evaluated through the pole-free equivalent 1/(2H sin(πH) Γ(2H)); the
    removable singularity at H=1/2 then yields the Brownian value 1 exactly.
    """
    if not 0.0 < H < 1.0:
        raise DomainError(f"fbm_sigma2 requires 0 < H < 1, got {H}")
    return 1.0 / (2.0 * H * math.sin(math.pi * H) * gamma_fn(2.0 * H))


def fbm_cov(H: float, t: float, s: float) -> float:
    """FBM covariance  (σ_H²/2)(|t|^{2H} + |s|^{2H} - |t-s|^{2H})."""
    s2 = fbm_sigma2(H)
    h2 = 2.0 * H
    return 0.5 * s2 * (abs(t) ** h2 + abs(s) ** h2 - abs(t - s) ** h2)


def fbm_increment_cov(H: float, tau1: float, tau2: float) -> float:
    """Stationary increment covariance
    (σ_H²/2)(|τ₁|^{2H} + |τ₂|^{2H} - |τ₁-τ₂|^{2H}); independent of base time."""
    s2 = fbm_sigma2(H)
    h2 = 2.0 * H
    return 0.5 * s2 * (abs(tau1) ** h2 + abs(tau2) ** h2 - abs(tau1 - tau2) ** h2)


# ---------------------------------------------------------------------------
# one-sided (Riemann-Liouville) FBM and MBM
# ---------------------------------------------------------------------------

def rl_fbm_cov(H: float, t: float, s: float) -> float:
    """One-sided FBM covariance for 0 <= s <= t:

        s^{H+1/2} t^{H-1/2} / ((H+1/2) Γ(H+1/2)²) · 2F1(1, 1/2-H; 3/2+H; s/t)

    Diagonal value t^{2H} / (2H Γ(H+1/2)²).
    """
    if not 0.0 < H < 1.0:
        raise DomainError(f"rl_fbm_cov requires 0 < H < 1, got {H}")
    if s < 0 or s > t:
        raise OrderingError(f"rl_fbm_cov requires 0 <= s <= t, got s={s}, t={t}")
    if s == 0.0:
        return 0.0
    g = gamma_fn(H + 0.5)
    if s == t:
        return t ** (2.0 * H) / (2.0 * H * g * g)
    f = gauss_2f1(1.0, 0.5 - H, 1.5 + H, s / t)
    return s ** (H + 0.5) * t ** (H - 0.5) * f / ((H + 0.5) * g * g)


def rl_mbm_cov(H, t: float, s: float) -> float:
    """One-sided multifractional covariance for 0 <= s <= t:

        s^{H(s)+1/2} t^{H(t)-1/2} · 2F1(1, 1/2-H(t); H(s)+3/2; s/t)
        / ((H(s)+1/2) Γ(H(s)+1/2) Γ(H(t)+1/2))

    Reduces exactly to rl_fbm_cov at constant H.  Exponent and
    normalization follow the moving-average construction (the printed
    form fails the quadrature oracle; see the negative-control tests).
    """
    H = as_hurst(H)
    if s < 0 or s > t:
        raise OrderingError(f"rl_mbm_cov requires 0 <= s <= t, got s={s}, t={t}")
    if s == 0.0:
        return 0.0
    Ht, Hs = H(t), H(s)
    gs, gt = gamma_fn(Hs + 0.5), gamma_fn(Ht + 0.5)
    if s == t:
        return t ** (Hs + Ht) / ((Hs + Ht) * gs * gt)
    f = gauss_2f1(1.0, 0.5 - Ht, Hs + 1.5, s / t)
    return s ** (Hs + 0.5) * t ** (Ht - 0.5) * f / ((Hs + 0.5) * gs * gt)


# ---------------------------------------------------------------------------
# fractional / multifractional Ornstein-Uhlenbeck
# ---------------------------------------------------------------------------

def weyl_fou_var(alpha: float, omega: float) -> float:
    """Stationary FOU variance  Γ(2α-1) (2ω)^{1-2α} / Γ(α)²."""
    if alpha <= 0.5:
        raise DomainError(f"weyl_fou_var requires alpha > 1/2, got {alpha}")
    if omega <= 0:
        raise DomainError(f"weyl_fou_var requires omega > 0, got {omega}")
    g = gamma_fn(alpha)
    return gamma_fn(2.0 * alpha - 1.0) * (2.0 * omega) ** (1.0 - 2.0 * alpha) / (g * g)


def weyl_fou_cov(alpha: float, omega: float, tau: float) -> float:
    """Stationary FOU covariance at lag τ:

        [1/(√π Γ(α))] (|τ|/(2ω))^{α-1/2} K_{α-1/2}(ω|τ|)

    Even in τ; τ=0 is routed to weyl_fou_var.
    """
    if alpha <= 0.5:
        raise DomainError(f"weyl_fou_cov requires alpha > 1/2, got {alpha}")
    if omega <= 0:
        raise DomainError(f"weyl_fou_cov requires omega > 0, got {omega}")
    atau = abs(tau)
    if atau == 0.0:
        return weyl_fou_var(alpha, omega)
    nu = alpha - 0.5
    return ((atau / (2.0 * omega)) ** nu * bessel_k(nu, omega * atau)
            / (math.sqrt(math.pi) * gamma_fn(alpha)))


def rl_fou_var(alpha: float, omega: float, t: float) -> float:
    """Transient FOU variance  (2ω)^{1-2α} γ(2α-1, 2ωt) / Γ(α)²;
    nondecreasing in t, tends to weyl_fou_var as t -> ∞."""
    if alpha <= 0.5:
        raise DomainError(f"rl_fou_var requires alpha > 1/2, got {alpha}")
    if omega <= 0:
        raise DomainError(f"rl_fou_var requires omega > 0, got {omega}")
    if t < 0:
        raise DomainError(f"rl_fou_var requires t >= 0, got {t}")
    if t == 0.0:
        return 0.0
    g = gamma_fn(alpha)
    return ((2.0 * omega) ** (1.0 - 2.0 * alpha)
            * lower_incomplete_gamma(2.0 * alpha - 1.0, 2.0 * omega * t) / (g * g))


def rl_fou_cov(alpha: float, omega: float, t: float, s: float) -> float:
    """One-sided FOU covariance for 0 <= s < t:

        [e^{-ω(t+s)} s^α t^{α-1} / (Γ(α+1)Γ(α))] Φ₁(1, 1-α; 1+α; s/t, 2ωs)
    """
    if alpha <= 0.5:
        raise DomainError(f"rl_fou_cov requires alpha > 1/2, got {alpha}")
    if omega <= 0:
        raise DomainError(f"rl_fou_cov requires omega > 0, got {omega}")
    if s < 0 or s >= t:
        raise OrderingError(f"rl_fou_cov requires 0 <= s < t, got s={s}, t={t}")
    if s == 0.0:
        return 0.0
    phi = humbert_phi1(1.0, 1.0 - alpha, 1.0 + alpha, s / t, 2.0 * omega * s)
    return (math.exp(-omega * (t + s)) * s ** alpha * t ** (alpha - 1.0)
            * phi / (gamma_fn(alpha + 1.0) * gamma_fn(alpha)))


def weyl_mou_cov(alpha, omega: float, t: float, s: float) -> float:
    """Two-sided MOU covariance for s < t:

        [e^{-ω(t-s)} (t-s)^{α(s)+α(t)-1} / Γ(α(t))] Ψ(α(s), α(s)+α(t); 2ω(t-s))

    with Ψ the Tricomi confluent hypergeometric function.  Not symmetric
    under relabeling when α varies (the process is not stationary).
    """
    alpha = as_alpha(alpha)
    if omega <= 0:
        raise DomainError(f"weyl_mou_cov requires omega > 0, got {omega}")
    if s >= t:
        raise OrderingError(f"weyl_mou_cov requires s < t, got s={s}, t={t}")
    at, as_ = alpha(t), alpha(s)
    tau = t - s
    psi = tricomi_psi(as_, as_ + at, 2.0 * omega * tau)
    return math.exp(-omega * tau) * tau ** (as_ + at - 1.0) * psi / gamma_fn(at)


def rl_mou_cov(alpha, omega: float, t: float, s: float) -> float:
    """One-sided MOU covariance for 0 <= s < t:

        [e^{-ω(t+s)} s^{α(s)} t^{α(t)-1} / (Γ(α(t))Γ(α(s)+1))]
            · Φ₁(1, 1-α(t); 1+α(s); s/t, 2ωs)

    Normalization Γ(α(t))Γ(α(s)+1) follows from the defining integral
    (coincides with the printed Γ(α(s)+1)Γ(α(s)) at constant α).
    """
    alpha = as_alpha(alpha)
    if omega <= 0:
        raise DomainError(f"rl_mou_cov requires omega > 0, got {omega}")
    if s < 0 or s >= t:
        raise OrderingError(f"rl_mou_cov requires 0 <= s < t, got s={s}, t={t}")
    if s == 0.0:
        return 0.0
    at, as_ = alpha(t), alpha(s)
    phi = humbert_phi1(1.0, 1.0 - at, 1.0 + as_, s / t, 2.0 * omega * s)
    return (math.exp(-omega * (t + s)) * s ** as_ * t ** (at - 1.0)
            * phi / (gamma_fn(at) * gamma_fn(as_ + 1.0)))


# ---------------------------------------------------------------------------
# fractional / multifractional Riesz-Bessel motion
# ---------------------------------------------------------------------------

def frbm_spectral_density(alpha: float, gamma: float, omega: float, k: float) -> float:
    """Spectral density  1/((2π) |k|^{2γ} (ω²+k²)^{α}).

    The k=0 singularity for γ > 0 is integrable, not an error; k=0 itself
    is rejected.
    """
    FRBM(alpha, gamma, omega)  # parameter validation
    if k == 0.0:
        raise DomainError("frbm_spectral_density is singular at k=0")
    return 1.0 / (2.0 * math.pi * abs(k) ** (2.0 * gamma)
                  * (omega * omega + k * k) ** alpha)


def _fractional_bessel_cov(alpha, omega, x):
    """γ=0 closed form:  [2^{1/2-α}/(√π Γ(α))] (|x|/ω)^{α-1/2} K_{α-1/2}(ω|x|)."""
    ax = abs(x)
    if ax == 0.0:
        return weyl_fou_var(alpha, omega)
    nu = alpha - 0.5
    return (2.0 ** (0.5 - alpha) / (math.sqrt(math.pi) * gamma_fn(alpha))
            * (ax / omega) ** nu * bessel_k(nu, omega * ax))


def _frbm_cov_two_term(alpha, gamma, omega, x):
    """Raw two-term 1F2 expression of the FRBM covariance (inverse Fourier
    transform of the spectral density).  Requires α+γ-1/2 off the integers."""
    ax = abs(x)
    z = (omega * ax / 2.0) ** 2
    t1 = (omega ** (1.0 - 2.0 * alpha - 2.0 * gamma)
          * gamma_fn(0.5 - gamma) * gamma_fn(alpha + gamma - 0.5)
          / (2.0 * math.pi * gamma_fn(alpha))
          * one_f_two(0.5 - gamma, 1.5 - alpha - gamma, 0.5, z))
    if ax == 0.0:
        return t1
    t2 = (ax ** (2.0 * alpha + 2.0 * gamma - 1.0) * gamma_fn(0.5 - alpha - gamma)
          / (2.0 ** (2.0 * alpha + 2.0 * gamma) * math.sqrt(math.pi)
             * gamma_fn(alpha + gamma))
          * one_f_two(alpha, alpha + gamma, alpha + gamma + 0.5, z))
    return t1 + t2


def frbm_cov(alpha: float, gamma: float, omega: float, x: float) -> float:
    """FRBM covariance at lag x.

    γ=0 routes to the fractional Bessel closed form; γ>0 evaluates the
    two-term 1F2 expression, which has parameter poles on
    α+γ-1/2 ∈ ℤ (logarithmic case, reported as unsupported).
    """
    FRBM(alpha, gamma, omega)
    if gamma == 0.0:
        return _fractional_bessel_cov(alpha, omega, x)
    lam = alpha + gamma - 0.5
    if abs(lam - round(lam)) < 1e-6:
        raise UnsupportedParameterError(
            f"frbm_cov: alpha+gamma-1/2 = {lam} is (numerically) an integer; "
            "the logarithmic case is not supported")
    return _frbm_cov_two_term(alpha, gamma, omega, x)


def mrbm_cov(alpha, gamma, omega: float, t: float, s: float) -> float:
    """Multifractional Riesz-Bessel covariance under the harmonizable
    extension:

        (1/π) ∫₀^∞ cos(k(t-s)) k^{-(γ(t)+γ(s))} (ω²+k²)^{-(α(t)+α(s))/2} dk

    which equals the FRBM closed form at the averaged exponents
    ((α(t)+α(s))/2, (γ(t)+γ(s))/2).
    """
    alpha, gamma = as_timefn(alpha), as_timefn(gamma)
    abar = 0.5 * (alpha(t) + alpha(s))
    gbar = 0.5 * (gamma(t) + gamma(s))
    return frbm_cov(abar, gbar, omega, t - s)


# ---------------------------------------------------------------------------
# generalized Cauchy
# ---------------------------------------------------------------------------

def gc_cov(alpha: float, beta: float, t: float) -> float:
    """Generalized Cauchy covariance  (1 + |t|^α)^{-β};  unit variance at t=0."""
    GC(alpha, beta)
    return math.exp(-beta * math.log1p(abs(t) ** alpha))


# ---------------------------------------------------------------------------
# dispatch: cov / var / Gram matrix
# ---------------------------------------------------------------------------

def _require_nonneg_times(t, s, family):
    if t < 0 or s < 0:
        raise DomainError(f"{family} is defined for t >= 0; got t={t}, s={s}")


def var(spec, t: float) -> float:
    """Variance of the process at time t."""
    f = spec.family
    if f == "fbm":
        return fbm_cov(spec.hurst, t, t)
    if f == "rlfbm":
        _require_nonneg_times(t, t, f)
        return rl_fbm_cov(spec.hurst, t, t)
    if f == "rlmbm":
        _require_nonneg_times(t, t, f)
        return rl_mbm_cov(spec.hurst, t, t)
    if f == "weylfou":
        return weyl_fou_var(spec.alpha, spec.omega)
    if f == "rlfou":
        _require_nonneg_times(t, t, f)
        return rl_fou_var(spec.alpha, spec.omega, t)
    if f == "weylmou":
        return weyl_fou_var(spec.alpha(t), spec.omega)
    if f == "rlmou":
        _require_nonneg_times(t, t, f)
        return rl_fou_var(spec.alpha(t), spec.omega, t)
    if f == "frbm":
        return frbm_cov(spec.alpha, spec.gamma, spec.omega, 0.0)
    if f == "mrbm":
        return mrbm_cov(spec.alpha, spec.gamma, spec.omega, t, t)
    if f == "gc":
        return 1.0
    raise DomainError(f"no closed-form variance for family {f!r}")


def cov(spec, t: float, s: float) -> float:
    """Symmetric covariance wrapper: sorts (t, s) and dispatches to the
    family's s <= t closed form.  MBM has no closed form (raises)."""
    if s > t:
        t, s = s, t
    f = spec.family
    if t == s:
        return var(spec, t)
    if f == "fbm":
        return fbm_cov(spec.hurst, t, s)
    if f == "rlfbm":
        _require_nonneg_times(t, s, f)
        return rl_fbm_cov(spec.hurst, t, s)
    if f == "rlmbm":
        _require_nonneg_times(t, s, f)
        return rl_mbm_cov(spec.hurst, t, s)
    if f == "weylfou":
        return weyl_fou_cov(spec.alpha, spec.omega, t - s)
    if f == "rlfou":
        _require_nonneg_times(t, s, f)
        return rl_fou_cov(spec.alpha, spec.omega, t, s)
    if f == "weylmou":
        return weyl_mou_cov(spec.alpha, spec.omega, t, s)
    if f == "rlmou":
        _require_nonneg_times(t, s, f)
        return rl_mou_cov(spec.alpha, spec.omega, t, s)
    if f == "frbm":
        return frbm_cov(spec.alpha, spec.gamma, spec.omega, t - s)
    if f == "mrbm":
        return mrbm_cov(spec.alpha, spec.gamma, spec.omega, t, s)
    if f == "gc":
        return gc_cov(spec.alpha, spec.beta, t - s)
    raise DomainError(f"no closed-form covariance for family {f!r} "
                      "(MBM is sampled by moving average, not by kernel)")


def cov_matrix(spec, times) -> np.ndarray:
    """Symmetric Gram matrix of the spec's kernel on a time grid."""
    times = np.asarray(times, dtype=float)
    n = len(times)
    f = spec.family
    if f == "fbm":
        h2 = 2.0 * spec.hurst
        s2 = fbm_sigma2(spec.hurst)
        T, S = np.meshgrid(times, times, indexing="ij")
        return 0.5 * s2 * (np.abs(T) ** h2 + np.abs(S) ** h2 - np.abs(T - S) ** h2)
    if f == "gc":
        lag = np.abs(times[:, None] - times[None, :])
        return (1.0 + lag ** spec.alpha) ** (-spec.beta)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            out[i, j] = out[j, i] = cov(spec, times[i], times[j])
    return out


# ---------------------------------------------------------------------------
# memory class and local regularity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MemoryClass:
    label: str  # "LRD" | "SRD" | "Boundary"
    criterion_note: str

    def __post_init__(self):
        if self.label not in ("LRD", "SRD", "Boundary"):
            raise DomainError(f"invalid memory class {self.label!r}")


def memory_class(spec) -> MemoryClass:
    """Long/short-range dependence classification from the integrated
    correlation criterion (divergent integral => LRD)."""
    f = spec.family
    if f in ("fbm", "rlfbm"):
        if spec.hurst == 0.5:
            return MemoryClass("Boundary", "H = 1/2 is Brownian motion (Markov)")
        return MemoryClass("LRD", "FBM is LRD except for H = 1/2")
    if f in ("mbm", "rlmbm"):
        lo, hi = spec.hurst.bounds()
        if lo == hi == 0.5:
            return MemoryClass("Boundary", "H(t) ≡ 1/2 is Brownian motion")
        return MemoryClass("LRD", "time-dependent Hölder exponent does not "
                                  "affect long-range dependence")
    if f in ("weylfou", "rlfou", "weylmou", "rlmou"):
        return MemoryClass("SRD", "fractional/multifractional OU processes "
                                  "are short memory")
    if f == "gc":
        ab = spec.alpha * spec.beta
        if ab <= 1.0:
            return MemoryClass("LRD", f"alpha*beta = {ab} <= 1")
        return MemoryClass("SRD", f"alpha*beta = {ab} > 1")
    if f == "frbm":
        if spec.gamma == 0.0:
            return MemoryClass("SRD", "gamma = 0 reduces to the Weyl FOU process")
        return MemoryClass("LRD", f"gamma = {spec.gamma} in (0, 1/2)")
    if f == "mrbm":
        gmin, gmax = spec.gamma.bounds()
        amin, _ = spec.alpha.bounds()
        if gmin == gmax == 0.0 and amin > 0.5:
            return MemoryClass("SRD", "gamma(t) = 0 with alpha(t) > 1/2 bounded")
        ts = _knot_union(spec.alpha, spec.gamma)
        min_sum = min(spec.alpha(t) + spec.gamma(t) for t in ts)
        if gmin > 0.0 and gmax < 0.5 and min_sum > 0.5:
            return MemoryClass("LRD", "0 < gamma(t) < 1/2 with "
                                      "alpha(t)+gamma(t) > 1/2 bounded")
        return MemoryClass("Boundary", "neither sufficient condition holds")
    raise DomainError(f"no memory classification for family {f!r}")


def _knot_union(*fns):
    """Union of the knot times of several piecewise-linear TimeFunctions
    (sums/extrema of such functions are attained on this set)."""
    ts = {0.0}
    for fn in fns:
        if fn.kind == "linear":
            ts.update(fn.params[2:])
        elif fn.kind == "tabulated":
            ts.update(t for t, _ in fn.params)
    return sorted(ts)


def tangent_index(spec, t0: float) -> float:
    """Index of the FBM tangent process at t0 (local Hölder exponent).

    GC reports the printed index α even though the covariance expansion
    1 - β|t|^α suggests α/2; the discrepancy is flagged so the empirical
    LASS test can measure which one is realized.
    """
    f = spec.family
    if f in ("fbm", "rlfbm"):
        kappa = spec.hurst
    elif f in ("mbm", "rlmbm"):
        kappa = spec.hurst(t0)
    elif f in ("weylfou", "rlfou"):
        kappa = spec.alpha - 0.5
    elif f in ("weylmou", "rlmou"):
        kappa = spec.alpha(t0) - 0.5
    elif f == "frbm":
        kappa = spec.alpha + spec.gamma - 0.5
    elif f == "mrbm":
        kappa = spec.alpha(t0) + spec.gamma(t0) - 0.5
    elif f == "gc":
        kappa = spec.alpha
        warnings.warn(
            "GC tangent index reported as printed (alpha); the local covariance "
            "expansion 1 - beta|t|^alpha suggests alpha/2 in the standard "
            "convention — compare both with the LASS estimator",
            ModelInconsistencyWarning, stacklevel=2)
    else:
        raise DomainError(f"no tangent index for family {f!r}")
    if not 0.0 < kappa < 1.0:
        warnings.warn(
            f"tangent index {kappa} outside (0,1) for family {f!r} at t0={t0}; "
            "reported unclamped", ModelInconsistencyWarning, stacklevel=2)
    return kappa


def local_dimension(spec, t0: float) -> float:
    """Local Hausdorff/box dimension of the graph at t0."""
    f = spec.family
    if f in ("fbm", "rlfbm"):
        return 2.0 - spec.hurst
    if f in ("mbm", "rlmbm"):
        return 2.0 - spec.hurst(t0)
    if f in ("weylfou", "rlfou"):
        return 2.5 - spec.alpha
    if f in ("weylmou", "rlmou"):
        return 2.5 - spec.alpha(t0)
    if f == "frbm":
        return 2.5 - spec.alpha - spec.gamma
    if f == "mrbm":
        return 2.5 - spec.alpha(t0) - spec.gamma(t0)
    if f == "gc":
        return 2.5 - spec.alpha
    raise DomainError(f"no local dimension for family {f!r}")

"""Special functions backing the closed-form covariance kernels.

Gamma-family functions and the modified Bessel K are delegated to
scipy.special (mature, machine-accurate); the Gauss hypergeometric 2F1,
the generalized hypergeometric 1F2 and the Humbert Phi1 are evaluated
here by series/quadrature because scipy does not provide them (or does
not provide them on the parameter ranges the kernels need).

All functions return finite floats or raise a typed error; NaN is never
propagated silently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp


def _silent_quad(f, a, b, **kw):
    """quad minus the IntegrationWarning chatter (QUADPACK's roundoff
    warnings fire even when the returned estimate is fine; accuracy is
    enforced by the callers' tolerance checks instead)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **kw)


class SpecialFunctionError(ValueError):
    """Base class for typed special-function failures."""


class DomainError(SpecialFunctionError):
    """Argument outside the supported domain."""


class PoleError(SpecialFunctionError):
    """Evaluation at (or too close to) a parameter pole."""


class DivergenceError(SpecialFunctionError):
    """Series/integral diverges for the requested arguments."""


class ConvergenceError(SpecialFunctionError):
    """Requested accuracy not reached within the term/subdivision caps."""


@dataclass(frozen=True)
class AccuracyBudget:
    """Accuracy targets for series evaluation.

    rel_tol   relative tolerance for term-based stopping rules
    abs_tol   absolute floor (terms below it may stop the sum)
    max_terms hard cap on series terms before ConvergenceError
    """

    rel_tol: float = 1e-13
    abs_tol: float = 0.0
    max_terms: int = 200_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be > 0")
        if self.abs_tol < 0:
            raise DomainError("abs_tol must be >= 0")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")


DEFAULT_BUDGET = AccuracyBudget()

# series switches (module constants; chosen so the acceptance suite passes
# at rel_tol 1e-10 with margin)
_Z_SWITCH_2F1 = 0.85        # direct series below, 1-z connection above
_DEGENERATE_EPS_2F1 = 0.02  # |c-a-b - integer| below this -> no connection formula
_PHI1_Y_SWITCH = 5.0        # integral representation beyond this y
_PHI1_X_SWITCH = 0.9        # integral representation beyond this x


def _is_nonpositive_integer(x):
    return x <= 0.0 and x == math.floor(x)


def gamma_fn(x: float) -> float:
    """Gamma function on the real line minus the poles {0, -1, -2, ...}.

    scipy's implementation applies the reflection formula for x < 0.
    """
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at x={x}")
    val = float(sp.gamma(x))
    if not math.isfinite(val):
        raise ConvergenceError(f"gamma overflow at x={x}")
    return val


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Lower incomplete gamma  γ(a,x) = ∫₀ˣ u^{a-1} e^{-u} du,  a > 0, x ≥ 0."""
    if a <= 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a}")
    if x < 0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    return float(sp.gammainc(a, x)) * gamma_fn(a)


def _series_2f1(a, b, c, z, budget, max_terms=None):
    """Direct power series for 2F1; valid for |z| < 1 (and at z=0)."""
    cap = budget.max_terms if max_terms is None else max_terms
    total = 1.0
    term = 1.0
    for n in range(cap):
        term *= (a + n) * (b + n) * z / ((c + n) * (n + 1))
        total += term
        if abs(term) <= budget.rel_tol * abs(total) + budget.abs_tol:
            return total
    raise ConvergenceError(
        f"2F1 series did not converge in {cap} terms (a={a}, b={b}, c={c}, z={z})")


def gauss_2f1(a: float, b: float, c: float, z: float,
              budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Gauss hypergeometric 2F1(a,b;c;z) for z in [0,1].

    Direct power series up to z_switch; beyond it the 1-z connection
    formula (both inner series then converge geometrically).  When
    c-a-b sits too close to an integer for the connection formula, the
    direct series is pushed with an enlarged term cap instead.  At z=1
    the Gauss summation value is returned, which requires c-a-b > 0.
    """
    if _is_nonpositive_integer(c):
        raise PoleError(f"2F1 pole: c={c} is a nonpositive integer")
    # terminating series (a or b a nonpositive integer): a polynomial, any z
    for p, q in ((a, b), (b, a)):
        if _is_nonpositive_integer(p):
            total = 1.0
            term = 1.0
            for k in range(int(-p)):
                term *= (a + k) * (b + k) * z / ((c + k) * (k + 1))
                total += term
            return total
    if z < 0.0 or z > 1.0:
        raise DomainError(f"gauss_2f1 supports z in [0,1], got {z}")
    if z == 0.0:
        return 1.0
    d = c - a - b
    if z == 1.0:
        if d <= 0:
            raise DivergenceError(
                f"2F1 diverges at z=1 when c-a-b={d} <= 0")
        return gamma_fn(c) * gamma_fn(d) * float(sp.rgamma(c - a)) * float(sp.rgamma(c - b))
    if z <= _Z_SWITCH_2F1:
        return _series_2f1(a, b, c, z, budget)
    if abs(d - round(d)) > _DEGENERATE_EPS_2F1:
        w = 1.0 - z
        # rgamma handles Γ poles in the coefficients by zeroing the term
        t1 = (gamma_fn(c) * gamma_fn(d) * float(sp.rgamma(c - a)) * float(sp.rgamma(c - b))
              * _series_2f1(a, b, 1.0 - d, w, budget))
        t2 = (gamma_fn(c) * gamma_fn(-d) * float(sp.rgamma(a)) * float(sp.rgamma(b))
              * w ** d * _series_2f1(c - a, c - b, 1.0 + d, w, budget))
        return t1 + t2
    # logarithmic-case neighbourhood: direct series still converges for z < 1,
    # just linearly with ratio z; extend the cap accordingly
    need = int(math.log(budget.rel_tol * (1.0 - z) + 1e-300) / math.log(z)) + 64
    return _series_2f1(a, b, c, z, budget, max_terms=max(budget.max_terms, need))


def one_f_two(a: float, b1: float, b2: float, z: float,
              budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Generalized hypergeometric 1F2(a; b1, b2; z), an entire function of z.

    Direct series with a term-ratio stopping rule; the (n!)² growth of the
    denominator makes the series safe for the moderate |z| the kernels use.
    """
    for b in (b1, b2):
        if _is_nonpositive_integer(b):
            raise PoleError(f"1F2 pole: lower parameter {b} is a nonpositive integer")
    total = 1.0
    term = 1.0
    tiny_run = 0
    for n in range(budget.max_terms):
        term *= (a + n) * z / ((b1 + n) * (b2 + n) * (n + 1))
        total += term
        if abs(term) <= budget.rel_tol * abs(total) + budget.abs_tol:
            tiny_run += 1
            if tiny_run >= 2:
                return total
        else:
            tiny_run = 0
    raise ConvergenceError(
        f"1F2 series did not converge in {budget.max_terms} terms "
        f"(a={a}, b1={b1}, b2={b2}, z={z})")


def _tricomi_quad(a, b, z):
    """Quadrature of the defining integral in the scaled variable t = τ/z,

        U(a,b,z) = z^{-a}/Γ(a) ∫₀^∞ e^{-τ} τ^{a-1} (1+τ/z)^{b-a-1} dτ,

    so the integrand's mass sits at τ = O(1) for every z; the τ^{a-1}
    endpoint singularity is removed by the power substitution w = τ^a.
    """
    def body(tau):
        return math.exp(-tau) * tau ** (a - 1.0) * (1.0 + tau / z) ** (b - a - 1.0)

    def head(w):
        tau = w ** (1.0 / a)
        return math.exp(-tau) * (1.0 + tau / z) ** (b - a - 1.0) / a

    i1, _ = _silent_quad(head, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=400)
    i2, _ = _silent_quad(body, 1.0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
    return z ** (-a) * (i1 + i2) / gamma_fn(a)


# hyperu's series/asymptotic crossover band; quadrature is used inside it
_HYPERU_BAD_Z = (4.0, 32.0)


def tricomi_psi(a: float, b: float, z: float) -> float:
    """Tricomi confluent hypergeometric U(a,b,z) for a > 0, z > 0,

    U(a,b,z) = (1/Γ(a)) ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.

    Delegated to scipy.special.hyperu except where that implementation is
    known to degrade — its series/asymptotic crossover band in z, and the
    logarithmic corner (b within ~1e-12 of an integer, non-integer a,
    small z) — where the defining integral is quadratured instead.
    """
    if a <= 0:
        raise DomainError(f"tricomi_psi requires a > 0, got {a}")
    if z <= 0:
        raise DomainError(f"tricomi_psi requires z > 0, got {z}")
    b_near_int = abs(b - round(b)) < 1e-6
    a_near_int = abs(a - round(a)) < 1e-12
    if b_near_int and not a_near_int and z < 0.5:
        return _tricomi_quad(a, b, z)
    if _HYPERU_BAD_Z[0] <= z <= _HYPERU_BAD_Z[1]:
        return _tricomi_quad(a, b, z)
    val = float(sp.hyperu(a, b, z))
    if not math.isfinite(val):
        raise ConvergenceError(f"hyperu failed at (a={a}, b={b}, z={z})")
    return val


def bessel_k(nu: float, z: float) -> float:
    """Modified Bessel function of the second kind K_ν(z), z > 0.

    Symmetric in ν -> -ν.  Delegated to scipy.special.kv; tests check it
    against quadrature of ∫₀^∞ e^{-z cosh t} cosh(νt) dt.
    """
    if z <= 0:
        raise DomainError(f"bessel_k requires z > 0, got {z}")
    val = float(sp.kv(nu, z))
    if not math.isfinite(val):
        raise ConvergenceError(f"kv failed at (nu={nu}, z={z})")
    return val


def _phi1_integral(a, b, c, x, y):
    """Integral representation of Phi1, valid for c > a > 0:

    Φ₁(a,b;c;x,y) = [Γ(c)/(Γ(a)Γ(c-a))] ∫₀¹ t^{a-1}(1-t)^{c-a-1}(1-xt)^{-b}e^{yt} dt
    """
    def f(t):
        return t ** (a - 1.0) * (1.0 - t) ** (c - a - 1.0) \
            * (1.0 - x * t) ** (-b) * math.exp(y * t)

    val, err = _silent_quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=400)
    scale = gamma_fn(c) * float(sp.rgamma(a)) * float(sp.rgamma(c - a))
    return val * scale


def humbert_phi1(a: float, b: float, c: float, x: float, y: float,
                 budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Humbert confluent hypergeometric of two variables

    Φ₁(a,b;c;x,y) = Σ_{m,n≥0} (a)_{m+n}(b)_m / ((c)_{m+n} m! n!) x^m y^n,  |x| < 1.

    Summed over m with the inner n-sum collapsed to 1F1(a+m;c+m;y); switched
    to the one-dimensional integral representation when the series converges
    slowly (large y or x near 1) and c > a > 0 makes the representation valid.
    """
    if _is_nonpositive_integer(c):
        raise PoleError(f"Phi1 pole: c={c} is a nonpositive integer")
    if abs(x) >= 1.0:
        raise DivergenceError(f"Phi1 diverges for |x| >= 1, got x={x}")
    if x == 0.0:
        return float(sp.hyp1f1(a, c, y))
    if y == 0.0:
        return gauss_2f1(a, b, c, x, budget) if x >= 0 else _phi1_integral(a, b, c, x, 0.0)
    if (y > _PHI1_Y_SWITCH or abs(x) > _PHI1_X_SWITCH) and c > a > 0:
        return _phi1_integral(a, b, c, x, y)
    total = 0.0
    coef = 1.0  # (a)_m (b)_m x^m / ((c)_m m!)
    tiny_run = 0
    for m in range(budget.max_terms):
        term = coef * float(sp.hyp1f1(a + m, c + m, y))
        total += term
        if abs(term) <= budget.rel_tol * abs(total) + budget.abs_tol:
            tiny_run += 1
            if tiny_run >= 2:
                return total
        else:
            tiny_run = 0
        coef *= (a + m) * (b + m) * x / ((c + m) * (m + 1))
        if coef == 0.0:  # (b)_m hit zero: series terminated exactly
            return total
    raise ConvergenceError(
        f"Phi1 series did not converge in {budget.max_terms} terms "
        f"(a={a}, b={b}, c={c}, x={x}, y={y})")

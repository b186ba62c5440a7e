"""Estimate regularity and memory properties from sample paths.

hurst_aggregated_variance  global scaling exponent from the log-log slope
                           of increment second moments across scales;
local_holder               sliding-window Hölder function via second-order
                           discrete variations (drift-insensitive);
lrd_periodogram            long/short-memory classification from the
                           low-frequency log-periodogram slope;
lass_tangent_test          empirical check that rescaled increments at a
                           point approach the tangent-FBM covariance shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .specfun import DomainError

__all__ = [
    "DegenerateInputError", "NonstationaryInputError", "EstimateReport",
    "hurst_aggregated_variance", "local_holder", "lrd_periodogram",
    "lass_tangent_test",
]


class DegenerateInputError(ValueError):
    """Input path carries no usable variation for the estimator."""


class NonstationaryInputError(ValueError):
    """Estimator requires a stationary-family path (or differencing)."""


@dataclass
class EstimateReport:
    estimator: str
    global_value: float | None = None
    local_values: list | None = None  # [(time, value), ...]
    confidence_radius: float = 0.0
    window: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.confidence_radius < 0:
            raise DomainError("confidence_radius must be >= 0")

    def to_dict(self):
        out = {
            "schema": 1,
            "estimator": self.estimator,
            "global_value": self.global_value,
            "local_values": [[float(t), float(v)] for t, v in self.local_values]
            if self.local_values is not None else None,
            "confidence_radius": self.confidence_radius,
            "window": self.window,
            "diagnostics": {},
        }
        for k, v in self.diagnostics.items():
            if isinstance(v, kernels.MemoryClass):
                out["diagnostics"][k] = {"label": v.label, "note": v.criterion_note}
            elif isinstance(v, (np.floating, np.integer)):
                out["diagnostics"][k] = v.item()
            else:
                out["diagnostics"][k] = v
        return out


def _values_and_dt(path):
    """Accept a SamplePath or a plain array (dt defaults to 1)."""
    if hasattr(path, "values") and hasattr(path, "grid"):
        return np.asarray(path.values, dtype=float), float(path.grid.step), \
            getattr(path, "spec", None), float(path.grid.start)
    return np.asarray(path, dtype=float), 1.0, None, 0.0


def _slope_with_se(x, y):
    """Least-squares slope and its standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ y) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - intercept - slope * x
    dof = max(n - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof / sxx)
    return slope, se, intercept


def hurst_aggregated_variance(path, scales=None) -> EstimateReport:
    """Global Hurst estimate: half the log-log slope of the increment
    second moment E[(x_{i+m} - x_i)^2] against the scale m.

    Estimates near or above 1 are flagged out-of-model (a smooth trend,
    not a fractional noise); a constant path is a degenerate input.
    """
    x, dt, _, _ = _values_and_dt(path)
    n = len(x)
    if scales is None:
        # cap the ladder well below n so the top scale keeps enough
        # effective blocks (log-variance noise biases the slope downward)
        mmax = n // 64
        scales = []
        m = 1
        while m <= max(mmax, 4):
            scales.append(m)
            m *= 2
    scales = sorted(int(m) for m in scales)
    if len(scales) < 3:
        raise DomainError("need at least 3 scales")
    if n < 2 * scales[-1]:
        raise DomainError(
            f"path length {n} < 2 * max scale {scales[-1]}")
    m2 = []
    for m in scales:
        d = x[m:] - x[:-m]
        m2.append(float(np.mean(d * d)))
    if min(m2) <= 0.0:
        raise DegenerateInputError("constant path: increments carry no variation")
    slope, se, _ = _slope_with_se(np.log(scales), np.log(m2))
    h = slope / 2.0
    diag = {"scales": scales, "second_moments": m2}
    if h >= 0.98 or h <= 0.02:
        diag["out_of_model"] = True
    return EstimateReport("aggregated_variance", global_value=h,
                          confidence_radius=se / 2.0, window=n,
                          diagnostics=diag)


def local_holder(path, window: int, scales=(1, 2), stride=None) -> EstimateReport:
    """Sliding-window local Hölder function from second-order discrete
    variations:  V_a = mean (x_{i+a} - 2x_i + x_{i-a})^2  within a window,
    Ĥ = log(V_{a2}/V_{a1}) / (2 log(a2/a1)).

    Second differences remove linear drift.  For OU-type paths the
    estimand is the local index alpha(t) - 1/2.
    """
    x, dt, _, t0 = _values_and_dt(path)
    n = len(x)
    if window < 16:
        raise DomainError(f"window must be >= 16, got {window}")
    if n < 4 * window:
        raise DomainError(f"path length {n} < 4 * window {window}")
    a1, a2 = sorted(int(a) for a in scales)
    if a1 < 1 or a2 <= a1:
        raise DomainError(f"scales must be increasing positive ints, got {scales}")
    stride = stride or max(window // 2, 1)
    half = window // 2
    centers = range(half + a2, n - half - a2, stride)
    locs = []
    for c in centers:
        lo, hi = c - half, c + half
        vs = []
        for a in (a1, a2):
            seg = x[lo:hi]
            d = seg[2 * a:] - 2.0 * seg[a:-a] + seg[:-2 * a]
            vs.append(float(np.mean(d * d)))
        if vs[0] <= 0.0 or vs[1] <= 0.0:
            raise DegenerateInputError(
                f"window at index {c}: constant segment, Hölder exponent undefined")
        locs.append((t0 + c * dt, math.log(vs[1] / vs[0]) / (2.0 * math.log(a2 / a1))))
    if not locs:
        raise DomainError("no complete windows fit the path")
    neff = max(window - 2 * a2, 4)
    radius = math.sqrt(3.0 / neff)  # delta-method scale for the log-ratio
    return EstimateReport("local_holder",
                          global_value=float(np.mean([v for _, v in locs])),
                          local_values=locs, confidence_radius=radius,
                          window=window, diagnostics={"scales": [a1, a2]})


_STATIONARY = ("weylfou", "gc", "frbm")


def lrd_periodogram(path, low_freq_fraction: float = 0.1,
                    difference: bool = False) -> EstimateReport:
    """Memory classification from the log-periodogram slope near zero
    frequency: I(λ) ~ λ^{-2d}; LRD when d exceeds twice its regression
    standard error, SRD otherwise (marginal positives are flagged in the
    diagnostics, never silently upgraded).

    Stationary-family paths are analyzed as-is; FBM-type paths must be
    passed with difference=True (increment series).
    """
    x, dt, spec, _ = _values_and_dt(path)
    if spec is not None and not difference and spec.family not in _STATIONARY:
        raise NonstationaryInputError(
            f"family {spec.family!r} is not stationary; pass difference=True "
            "to analyze the increment series")
    if difference:
        x = np.diff(x)
    n = len(x)
    if n < 64:
        raise DomainError(f"need at least 64 samples, got {n}")
    x = x - x.mean()
    if not np.any(x):
        raise DegenerateInputError("constant series has no periodogram")
    X = np.fft.rfft(x)
    nfreq = len(X) - 1
    k = max(8, int(low_freq_fraction * nfreq))
    j = np.arange(1, k + 1)
    lam = 2.0 * math.pi * j / n
    I = (np.abs(X[1:k + 1]) ** 2) / (2.0 * math.pi * n)
    if np.any(I <= 0.0):
        raise DegenerateInputError("vanishing periodogram ordinates")
    slope, se, _ = _slope_with_se(np.log(lam), np.log(I))
    d = -slope / 2.0
    sed = se / 2.0
    label = "LRD" if d > 2.0 * sed else "SRD"
    mc = kernels.MemoryClass(label, f"log-periodogram d = {d:.4f} "
                                    f"(s.e. {sed:.4f}, margin 2 s.e.)")
    diag = {"d": d, "memory_class": mc, "n_freq": int(k)}
    if label == "SRD" and d > 0.0:
        diag["marginal"] = True
    return EstimateReport("lrd_periodogram", global_value=d,
                          confidence_radius=sed, window=n, diagnostics=diag)


def _tangent_shape(kappa, u):
    """Normalized FBM covariance shape on the offset lattice u (variance at
    the first offset scaled to 1)."""
    U, V = np.meshgrid(u, u, indexing="ij")
    C = 0.5 * (np.abs(U) ** (2 * kappa) + np.abs(V) ** (2 * kappa)
               - np.abs(U - V) ** (2 * kappa))
    return C / C[0, 0]


def lass_tangent_test(ensemble, grid, t0: float, strides, u_count: int = 4,
                      kappa: float | None = None, spec=None,
                      kappa_candidates=None) -> EstimateReport:
    """Empirical local-asymptotic-self-similarity test at t0.

    For each scale ρ = stride*dt the ensemble's increment covariance
    Ĉ_ρ(u,v) = mean[(Z(t0+ρu) - Z(t0))(Z(t0+ρv) - Z(t0))],  u = 1..u_count,
    is normalized by its first-offset variance and compared (relative
    Frobenius distance) with the normalized tangent-FBM covariance of
    index κ.  The distance must shrink as ρ does; κ defaults to the
    spec's predicted tangent index.
    """
    Z = np.stack([p.values for p in ensemble]) \
        if not isinstance(ensemble, np.ndarray) else np.asarray(ensemble)
    npaths = Z.shape[0]
    if npaths < 1000:
        raise DomainError(f"ensemble of {npaths} paths; need >= 1000")
    strides = sorted((int(m) for m in strides), reverse=True)  # rho decreasing
    if len(strides) < 3:
        raise DomainError("need at least 3 scales")
    dt = float(grid.step)
    i0 = int(round((t0 - grid.start) / dt))
    if not 0 <= i0 < grid.n:
        raise DomainError(f"t0={t0} not on the grid")
    if i0 + strides[0] * u_count >= grid.n:
        raise DomainError("largest scale leaves the grid; shrink strides or u_count")
    if kappa is None:
        if spec is None:
            raise DomainError("provide kappa or spec")
        kappa = kernels.tangent_index(spec, t0)
    u = np.arange(1, u_count + 1, dtype=float)

    def distances(kap):
        target = _tangent_shape(kap, u)
        tnorm = float(np.linalg.norm(target))
        out = []
        for m in strides:
            idx = i0 + m * np.arange(1, u_count + 1)
            D = Z[:, idx] - Z[:, [i0]]
            C = D.T @ D / npaths
            C = C / C[0, 0]
            out.append(float(np.linalg.norm(C - target)) / tnorm)
        return out

    dists = distances(kappa)
    diag = {"kappa": kappa,
            "monotone_decreasing": bool(np.all(np.diff(dists) < 0))}
    if kappa_candidates:
        cand = {float(k): distances(float(k)) for k in kappa_candidates}
        diag["kappa_candidates"] = {str(k): v for k, v in cand.items()}
        best = min(cand, key=lambda k: cand[k][-1])
        diag["best_kappa"] = best
    local = [(m * dt, d) for m, d in zip(strides, dists)]
    se = math.sqrt(2.0 / npaths)
    return EstimateReport("lass_tangent_test", global_value=dists[-1],
                          local_values=local, confidence_radius=se,
                          window=npaths, diagnostics=diag)

"""Exact Gaussian sample-path generation for every process spec.

All randomness flows through one documented transform: the Philox4x64
counter-based generator supplies raw 64-bit words, mapped to (0,1) by
(raw >> 11 + 1/2) * 2^-53 and to standard normals by the inverse normal
CDF.  Identical (spec, grid, seed, method) therefore reproduce identical
paths, and replicate ensembles are split with a SplitMix64 subseed mix.

Methods:
  Cholesky      — any spec with a closed-form kernel (jitter-escalated);
  Circulant     — stationary kernels and fractional-noise increments via
                  minimal circulant embedding with doubling;
  MovingAverage — multifractional Brownian motion by Riemann-sum
                  discretization of the moving-average representation on
                  a shared white-noise lattice, rows rescaled so the
                  variance matches sigma^2_{H(t)} t^{2H(t)} exactly.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import kernels
from .kernels import as_hurst, fbm_sigma2
from .specfun import DomainError, gamma_fn

__all__ = [
    "TimeGrid", "SamplePath", "SamplerError", "derive_subseed",
    "cholesky_sample", "circulant_sample", "fbm_from_fgn",
    "mbm_moving_average_sample", "sample", "sample_ensemble",
    "write_path_csv", "read_path_csv", "write_metadata",
]


class SamplerError(RuntimeError):
    """Path generation failed (factorization, embedding, grid misuse)."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: times are start + i*step for i in range(n)."""

    start: float
    step: float
    n: int

    def __post_init__(self):
        if self.step <= 0:
            raise DomainError(f"TimeGrid step must be > 0, got {self.step}")
        if self.n < 1:
            raise DomainError(f"TimeGrid needs n >= 1 points, got {self.n}")
        if not math.isfinite(self.start + self.n * self.step):
            raise DomainError("TimeGrid exceeds numeric range")

    @property
    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)


@dataclass
class SamplePath:
    """A realized path with its provenance."""

    grid: TimeGrid
    values: np.ndarray
    spec: object
    seed: int
    method: str  # "Cholesky" | "Circulant" | "MovingAverage"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise SamplerError(
                f"values length {self.values.shape} != grid n {self.grid.n}")
        if not np.all(np.isfinite(self.values)):
            raise SamplerError("non-finite path values")


_MASK64 = (1 << 64) - 1


def derive_subseed(seed: int, path_index: int) -> int:
    """SplitMix64 mix of (seed, path_index): deterministic, collision-free
    in practice over ensembles."""
    z = (int(seed) + (int(path_index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _normals(seed: int, count: int) -> np.ndarray:
    """Standard normals from the Philox counter stream via inverse CDF."""
    raw = np.random.Philox(key=int(seed) & _MASK64).random_raw(count)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u)


# ---------------------------------------------------------------------------
# Cholesky sampling from any closed-form kernel
# ---------------------------------------------------------------------------

_JITTER_LADDER = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


def _cholesky_state(spec, grid):
    """Factor the Gram matrix once; zero-variance rows (process pinned at 0)
    are excluded from the factor and re-inserted as exact zeros."""
    C = kernels.cov_matrix(spec, grid.times)
    diag = np.diag(C)
    max_diag = float(diag.max()) if len(diag) else 0.0
    if max_diag <= 0.0:
        return {"L": None, "free": np.zeros(grid.n, dtype=bool), "jitter": 0.0}
    free = diag > 1e-14 * max_diag
    A = C[np.ix_(free, free)]
    jitter_used = 0.0
    L = None
    for jit in (0.0,) + _JITTER_LADDER:
        try:
            L = np.linalg.cholesky(A + jit * max_diag * np.eye(A.shape[0]))
            jitter_used = jit
            break
        except np.linalg.LinAlgError:
            continue
    if L is None:
        lam_min = float(np.linalg.eigvalsh(A).min())
        raise SamplerError(
            f"Cholesky failed after jitter {_JITTER_LADDER[-1]:g}*max_diag; "
            f"smallest eigenvalue estimate {lam_min:g}")
    return {"L": L, "free": free, "jitter": jitter_used}


def _cholesky_draw(state, n, seed):
    vals = np.zeros(n)
    if state["L"] is not None:
        k = state["L"].shape[0]
        vals[state["free"]] = state["L"] @ _normals(seed, k)
    return vals


def cholesky_sample(spec, grid: TimeGrid, seed: int) -> SamplePath:
    """Exact sampling by Cholesky factorization of the kernel Gram matrix.

    Jitter escalates from 1e-12 to 1e-8 of the largest diagonal entry and
    is recorded in the metadata; rows with (numerically) zero variance are
    pinned to exactly 0.
    """
    state = _cholesky_state(spec, grid)
    vals = _cholesky_draw(state, grid.n, seed)
    return SamplePath(grid, vals, spec, seed, "Cholesky",
                      {"jitter": state["jitter"]})


# ---------------------------------------------------------------------------
# circulant embedding for stationary kernels
# ---------------------------------------------------------------------------

def _embedding_eigs(acov_fn, m):
    """Eigenvalues of the circulant embedding of the covariance sequence
    c_0..c_m (embedding size 2m)."""
    M = 2 * m
    j = np.arange(M)
    lags = np.minimum(j, M - j)
    c = np.array([acov_fn(int(k)) for k in range(m + 1)])
    row = c[lags]
    return np.fft.fft(row).real


def _circulant_state(acov_fn, n, max_factor=2 ** 14):
    """Grow the embedding (doubling) until its eigenvalues are nonnegative
    up to the -1e-10 clip tolerance; returns None when the cap is hit."""
    m = max(n - 1, 1)
    while m <= max_factor * n:
        lam = _embedding_eigs(acov_fn, m)
        floor = -1e-10 * max(lam.max(), 1.0)
        if lam.min() >= floor:
            return {"lam": np.clip(lam, 0.0, None), "m": m,
                    "min_eig": float(lam.min())}
        m *= 2
    return None


def _circulant_draw(state, n, seed):
    """Synthesis: path = Re(FFT(W)) with Hermitian half-spectrum weights.

    Draw order (fixed for reproducibility): W_0, W_m, then the m-1
    interior real parts followed by the m-1 imaginary parts.
    """
    lam, m = state["lam"], state["m"]
    M = 2 * m
    z = _normals(seed, M)
    W = np.zeros(M, dtype=complex)
    W[0] = math.sqrt(lam[0] / M) * z[0]
    W[m] = math.sqrt(lam[m] / M) * z[1]
    re = z[2:m + 1]
    im = z[m + 1:2 * m]
    j = np.arange(1, m)
    W[j] = np.sqrt(lam[j] / (2 * M)) * (re + 1j * im)
    W[M - j] = np.conj(W[j])
    x = np.fft.fft(W).real
    return x[:n]


def _stationary_acov(spec, step):
    f = spec.family
    if f == "weylfou":
        def acov(j):
            return (kernels.weyl_fou_var(spec.alpha, spec.omega) if j == 0
                    else kernels.weyl_fou_cov(spec.alpha, spec.omega, j * step))
        return acov
    if f == "gc":
        return lambda j: kernels.gc_cov(spec.alpha, spec.beta, j * step)
    if f == "frbm":
        return lambda j: kernels.frbm_cov(spec.alpha, spec.gamma, spec.omega, j * step)
    raise DomainError(f"circulant sampling needs a stationary family, got {f!r}")


def circulant_sample(spec, grid: TimeGrid, seed: int) -> SamplePath:
    """Exact stationary sampling by circulant embedding; falls back to
    Cholesky (with a logged warning) if no nonnegative embedding is found."""
    acov = _stationary_acov(spec, grid.step)
    state = _circulant_state(acov, grid.n)
    if state is None:
        warnings.warn(f"circulant embedding failed for {spec}; "
                      "falling back to Cholesky", RuntimeWarning, stacklevel=2)
        path = cholesky_sample(spec, grid, seed)
        path.metadata["fallback"] = "circulant embedding not nonnegative"
        return path
    vals = _circulant_draw(state, grid.n, seed)
    return SamplePath(grid, vals, spec, seed, "Circulant",
                      {"embedding_size": 2 * state["m"],
                       "embedding_min_eig": state["min_eig"]})


# ---------------------------------------------------------------------------
# FBM from cumulated fractional Gaussian noise
# ---------------------------------------------------------------------------

def _fgn_acov_fn(H, step):
    s2 = fbm_sigma2(H) * step ** (2.0 * H)

    def acov(j):
        return 0.5 * s2 * (abs(j + 1) ** (2 * H) - 2 * abs(j) ** (2 * H)
                           + abs(j - 1) ** (2 * H))
    return acov


def fbm_from_fgn(H: float, grid: TimeGrid, seed: int) -> SamplePath:
    """FBM as the cumulative sum of circulant-sampled stationary increments
    (fractional Gaussian noise); the grid must start at 0, and B_H(0) = 0."""
    if grid.start != 0.0:
        raise DomainError("fbm_from_fgn requires a grid starting at 0")
    spec = kernels.FBM(H)
    if grid.n == 1:
        return SamplePath(grid, np.zeros(1), spec, seed, "Circulant", {})
    acov = _fgn_acov_fn(H, grid.step)
    state = _circulant_state(acov, grid.n - 1)
    if state is None:
        raise SamplerError(f"no nonnegative circulant embedding for FGN H={H}")
    fgn = _circulant_draw(state, grid.n - 1, seed)
    vals = np.concatenate([[0.0], np.cumsum(fgn)])
    return SamplePath(grid, vals, spec, seed, "Circulant",
                      {"embedding_size": 2 * state["m"],
                       "embedding_min_eig": state["min_eig"]})


# ---------------------------------------------------------------------------
# MBM by moving-average discretization
# ---------------------------------------------------------------------------

_MBM_COARSE_RATIO = 1.07


def _mbm_lattice(grid, oversample, truncation):
    """Shared white-noise lattice: midpoints u and cell widths w.

    Fine uniform cells (spacing step/oversample) cover the singular region
    (-fine_ext, T]; the smooth far tail down to -truncation uses
    geometrically growing cells (the kernel difference there decays like
    |u|^{H-3/2} with a bounded relative curvature per cell).
    """
    T = float(grid.times[-1])
    du = grid.step / oversample
    fine_ext = 0.25 * max(T, 1.0)
    u_fine = np.arange(-fine_ext, T, du) + du / 2.0
    w_fine = np.full(len(u_fine), du)
    bounds = [-fine_ext]
    while bounds[-1] > -truncation:
        bounds.append(bounds[-1] * _MBM_COARSE_RATIO)
    b = np.array(bounds)
    u_coarse = 0.5 * (b[:-1] + b[1:])
    w_coarse = np.abs(np.diff(b))
    u = np.concatenate([u_coarse[::-1], u_fine])
    w = np.concatenate([w_coarse[::-1], w_fine])
    return u, w


def _mbm_state(hurst, grid, oversample=4, truncation=None):
    """Kernel matrix of the discretized moving-average representation.

    One white-noise lattice is shared by all output times, so the field is
    jointly Gaussian; the left tail is truncated at -truncation with the
    recorded bias bound; each row is rescaled so Var(B_{H(t_i)}(t_i)) is
    exact.
    """
    hurst = as_hurst(hurst)
    if grid.start != 0.0:
        raise DomainError("mbm_moving_average_sample requires a grid starting at 0")
    times = grid.times
    T = float(times[-1]) if grid.n else 0.0
    if truncation is None:
        # the geometric tail lattice makes deep horizons cheap (~log cells)
        truncation = 1e4 * max(T, 1.0)
    u, w = _mbm_lattice(grid, oversample, truncation)
    sqw = np.sqrt(w)
    A = np.zeros((grid.n, len(u)))
    rel_bias = 0.0
    for i, t in enumerate(times):
        if t == 0.0:
            continue
        H = hurst(t)
        e = H - 0.5
        k = np.where(t - u > 0.0, np.abs(t - u) ** e, 0.0) \
            - np.where(-u > 0.0, np.abs(u) ** e, 0.0)
        row = k * sqw / gamma_fn(H + 0.5)
        target_var = fbm_sigma2(H) * t ** (2.0 * H)
        raw_var = float(row @ row)
        # truncated-tail variance bound (mean-value estimate of the kernel
        # difference), relative to the exact variance
        tail = ((e * t) ** 2 * truncation ** (2 * H - 2.0) / (2.0 - 2.0 * H)
                / gamma_fn(H + 0.5) ** 2)
        rel_bias = max(rel_bias, tail / target_var)
        A[i] = row * math.sqrt(target_var / raw_var)
    meta = {"oversample": oversample, "truncation": truncation,
            "tail_bias_bound": rel_bias}
    if rel_bias > 1e-2:
        warnings.warn(f"MBM truncation bias bound {rel_bias:.2e} above 1e-2; "
                      "increase truncation", RuntimeWarning, stacklevel=3)
        meta["bias_warning"] = True
    return {"A": A, "m": len(u), "meta": meta}


def mbm_moving_average_sample(hurst, grid: TimeGrid, seed: int,
                              oversample: int = 4,
                              truncation: float | None = None) -> SamplePath:
    """Multifractional Brownian motion path; H may be a constant or any
    HurstFunction.  B(0) = 0 exactly."""
    state = _mbm_state(hurst, grid, oversample, truncation)
    vals = state["A"] @ _normals(seed, state["m"])
    return SamplePath(grid, vals, kernels.MBM(as_hurst(hurst)), seed,
                      "MovingAverage", dict(state["meta"]))


# ---------------------------------------------------------------------------
# dispatch and ensembles
# ---------------------------------------------------------------------------

_DEFAULT_METHOD = {
    "fbm": "Circulant", "rlfbm": "Cholesky", "mbm": "MovingAverage",
    "rlmbm": "Cholesky", "weylfou": "Circulant", "rlfou": "Cholesky",
    "weylmou": "Cholesky", "rlmou": "Cholesky", "frbm": "Circulant",
    "mrbm": "Cholesky", "gc": "Circulant",
}


def _prepare(spec, grid, method):
    """Build the reusable sampler state once; returns (method, draw(seed))."""
    f = spec.family
    method = method or _DEFAULT_METHOD[f]
    if f == "fbm" and method == "Circulant" and grid.start != 0.0:
        method = "Cholesky"
    if method == "MovingAverage":
        if f not in ("mbm", "fbm"):
            raise DomainError(f"MovingAverage method supports MBM/FBM, not {f!r}")
        hurst = spec.hurst if f == "mbm" else kernels.HurstFunction.constant(spec.hurst)
        state = _mbm_state(hurst, grid)

        def draw(seed):
            return SamplePath(grid, state["A"] @ _normals(seed, state["m"]),
                              spec, seed, "MovingAverage", dict(state["meta"]))
        return draw
    if method == "Circulant":
        if f == "fbm":
            if grid.n == 1:
                return lambda seed: SamplePath(grid, np.zeros(1), spec, seed,
                                               "Circulant", {})
            acov = _fgn_acov_fn(spec.hurst, grid.step)
            state = _circulant_state(acov, grid.n - 1)
            if state is None:
                raise SamplerError(f"no nonnegative FGN embedding for {spec}")

            def draw(seed):
                fgn = _circulant_draw(state, grid.n - 1, seed)
                return SamplePath(grid, np.concatenate([[0.0], np.cumsum(fgn)]),
                                  spec, seed, "Circulant",
                                  {"embedding_size": 2 * state["m"]})
            return draw
        acov = _stationary_acov(spec, grid.step)
        state = _circulant_state(acov, grid.n)
        if state is None:
            chol = _cholesky_state(spec, grid)

            def draw(seed):
                p = SamplePath(grid, _cholesky_draw(chol, grid.n, seed), spec,
                               seed, "Cholesky", {"jitter": chol["jitter"]})
                p.metadata["fallback"] = "circulant embedding not nonnegative"
                return p
            return draw

        def draw(seed):
            return SamplePath(grid, _circulant_draw(state, grid.n, seed), spec,
                              seed, "Circulant", {"embedding_size": 2 * state["m"]})
        return draw
    if method == "Cholesky":
        state = _cholesky_state(spec, grid)
        return lambda seed: SamplePath(grid, _cholesky_draw(state, grid.n, seed),
                                       spec, seed, "Cholesky",
                                       {"jitter": state["jitter"]})
    raise DomainError(f"unknown sampling method {method!r}")


def sample(spec, grid: TimeGrid, seed: int, method: str | None = None) -> SamplePath:
    """Generate one path with the family's default (or requested) method."""
    return _prepare(spec, grid, method)(seed)


def sample_ensemble(spec, grid: TimeGrid, seed: int, n_paths: int,
                    method: str | None = None) -> np.ndarray:
    """(n_paths, grid.n) array; path i uses derive_subseed(seed, i), so
    replicate i is stable regardless of ensemble size."""
    draw = _prepare(spec, grid, method)
    out = np.empty((n_paths, grid.n))
    for i in range(n_paths):
        out[i] = draw(derive_subseed(seed, i)).values
    return out


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def write_path_csv(path: SamplePath, fname):
    """CSV with header t,value; shortest round-trip decimal formatting."""
    with open(fname, "w") as fh:
        fh.write("t,value\n")
        for t, v in zip(path.grid.times, path.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def read_path_csv(fname):
    """Read a t,value CSV; raises SamplerError naming the offending row."""
    times, vals = [], []
    with open(fname) as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "t,value":
            raise SamplerError(f"row 1: expected header 't,value', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                t, v = float(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                raise SamplerError(f"row {lineno}: malformed CSV line {line!r}")
            times.append(t)
            vals.append(v)
    if not times:
        raise SamplerError("row 2: no data rows")
    return np.asarray(times), np.asarray(vals)


def write_metadata(fname, spec, grid, seeds, method, extra=None):
    """JSON sidecar with the run provenance."""
    doc = {
        "schema": 1,
        "spec": kernels.spec_to_dict(spec),
        "grid": {"start": grid.start, "step": grid.step, "n": grid.n},
        "seeds": list(seeds),
        "method": method,
    }
    if extra:
        doc.update(extra)
    with open(fname, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

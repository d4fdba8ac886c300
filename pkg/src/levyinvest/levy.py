"""Levy demand-shock models and path/extrema sampling.

Four families are supported, all with stationary independent increments:

  brownian_drift    X_t = mu*t + sigma*W_t
  merton            adds compound-Poisson jumps with Gaussian sizes
  kou               adds compound-Poisson jumps with two-sided exponential
                    sizes: +Exp(eta_plus) w.p. p_up, -Exp(eta_minus) otherwise
  symmetric_stable  X_t = mu*t + scale * (symmetric alpha-stable), 1 < alpha < 2

The Laplace exponent psi(lam) = log E[exp(lam * X_1)] is closed-form where
the exponential moment exists.  Path sampling is exact per step for the
Gaussian part, with finite-activity jumps inserted at their exact arrival
times so no jump straddles a grid step.  Running extrema at an independent
exponential horizon can be sampled without discretization bias for the
diffusive families by drawing each inter-jump segment's maximum and minimum
from the Brownian-bridge law given the segment endpoints.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConstructionError, DomainError

__all__ = [
    "Family",
    "LevyModel",
    "SamplePath",
    "ExtremaSample",
    "ExtremaPool",
    "laplace_exponent",
    "sample_horizon",
    "sample_path",
    "path_extrema",
    "sample_extrema",
    "default_step",
]

# Paths are simulated in chunks of this many replicates.  Each chunk draws
# from its own spawned child generator, so results are identical no matter
# how chunks are scheduled across workers.
_CHUNK = 16384


class Family(str, Enum):
    BROWNIAN_DRIFT = "brownian_drift"
    MERTON = "merton"
    KOU = "kou"
    STABLE = "symmetric_stable"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ConstructionError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LevyModel:
    """Parameter bundle for one Levy process.

    Use the classmethod constructors (`brownian`, `merton`, `kou`, `stable`)
    rather than filling fields by hand; they validate the family-specific
    parameter ranges.  `allow_degenerate` admits the deterministic pure-drift
    process (sigma = 0, no jumps), which is rejected by default and exists
    only as an analytic oracle for tests.
    """

    family: Family
    mu: float = 0.0
    sigma: float = 0.0
    jump_intensity: float = 0.0
    jump_mean: float = 0.0   # merton: mean of Gaussian jump sizes
    jump_sd: float = 0.0     # merton: sd of Gaussian jump sizes
    p_up: float = 0.0        # kou: probability a jump is upward
    eta_plus: float = 0.0    # kou: rate of upward exponential jump sizes
    eta_minus: float = 0.0   # kou: rate of downward exponential jump sizes
    stable_index: float = 0.0
    stable_scale: float = 0.0
    allow_degenerate: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        _require_finite("mu", self.mu)
        _require_finite("sigma", self.sigma)
        if self.sigma < 0:
            raise ConstructionError(f"sigma must be >= 0, got {self.sigma!r}")
        fam = self.family
        if fam is Family.BROWNIAN_DRIFT:
            if self.sigma == 0.0 and not self.allow_degenerate:
                raise ConstructionError(
                    "sigma = 0 gives a deterministic drift; pass allow_degenerate=True "
                    "only for test oracles"
                )
        elif fam in (Family.MERTON, Family.KOU):
            if self.sigma <= 0.0:
                raise ConstructionError(f"{fam.value} requires sigma > 0, got {self.sigma!r}")
            if not self.jump_intensity > 0.0:
                raise ConstructionError(
                    f"{fam.value} requires jump_intensity > 0 (use brownian_drift for "
                    f"a pure diffusion), got {self.jump_intensity!r}"
                )
            if fam is Family.MERTON:
                _require_finite("jump_mean", self.jump_mean)
                if self.jump_sd < 0:
                    raise ConstructionError(f"jump_sd must be >= 0, got {self.jump_sd!r}")
            else:
                if not 0.0 < self.p_up < 1.0:
                    raise ConstructionError(f"p_up must lie in (0, 1), got {self.p_up!r}")
                if not (self.eta_plus > 0.0 and self.eta_minus > 0.0):
                    raise ConstructionError("eta_plus and eta_minus must be > 0")
        elif fam is Family.STABLE:
            if not 1.0 < self.stable_index < 2.0:
                raise ConstructionError(
                    f"stable_index must lie in (1, 2), got {self.stable_index!r}"
                )
            if not self.stable_scale > 0.0:
                raise ConstructionError(f"stable_scale must be > 0, got {self.stable_scale!r}")
            if self.sigma != 0.0 or self.jump_intensity != 0.0:
                raise ConstructionError(
                    "symmetric_stable carries its own jump structure; sigma and "
                    "jump_intensity must be 0"
                )
        else:  # pragma: no cover - enum is exhaustive
            raise ConstructionError(f"unknown family {fam!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def brownian(cls, mu: float, sigma: float, *, allow_degenerate: bool = False) -> "LevyModel":
        return cls(Family.BROWNIAN_DRIFT, mu=mu, sigma=sigma, allow_degenerate=allow_degenerate)

    @classmethod
    def merton(cls, mu: float, sigma: float, jump_intensity: float,
               jump_mean: float, jump_sd: float) -> "LevyModel":
        return cls(Family.MERTON, mu=mu, sigma=sigma, jump_intensity=jump_intensity,
                   jump_mean=jump_mean, jump_sd=jump_sd)

    @classmethod
    def kou(cls, mu: float, sigma: float, jump_intensity: float,
            p_up: float, eta_plus: float, eta_minus: float) -> "LevyModel":
        return cls(Family.KOU, mu=mu, sigma=sigma, jump_intensity=jump_intensity,
                   p_up=p_up, eta_plus=eta_plus, eta_minus=eta_minus)

    @classmethod
    def stable(cls, mu: float, stable_index: float, stable_scale: float) -> "LevyModel":
        return cls(Family.STABLE, mu=mu, stable_index=stable_index,
                   stable_scale=stable_scale)

    # -- classification -----------------------------------------------------

    @property
    def hits_points(self) -> bool:
        """Whether the process reaches any fixed point with positive probability.

        True for every constructible model here: the diffusive families carry
        a Gaussian component, and the stable family with index in (1, 2) is
        point-recurrent.  The degenerate drift moves continuously, so it too
        passes through every point on its ray.
        """
        return True

    @property
    def is_degenerate(self) -> bool:
        return (self.family is Family.BROWNIAN_DRIFT and self.sigma == 0.0
                and self.allow_degenerate)


def laplace_exponent(model: LevyModel, lam: float) -> float:
    """log E[exp(lam * X_1)] where the exponential moment exists.

    Raises DomainError outside the finiteness domain: for the kou family
    that is lam in (-eta_minus, eta_plus); for symmetric_stable only lam = 0
    has a finite exponential moment.
    """
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam!r}")
    fam = model.family
    base = model.mu * lam + 0.5 * model.sigma ** 2 * lam * lam
    if fam is Family.BROWNIAN_DRIFT:
        return base
    if fam is Family.MERTON:
        jump_mgf = math.exp(model.jump_mean * lam + 0.5 * (model.jump_sd * lam) ** 2)
        return base + model.jump_intensity * (jump_mgf - 1.0)
    if fam is Family.KOU:
        if not (-model.eta_minus < lam < model.eta_plus):
            raise DomainError(
                f"kou exponential moment requires lambda in ({-model.eta_minus!r}, "
                f"{model.eta_plus!r}), got {lam!r}"
            )
        jump_mgf = (model.p_up * model.eta_plus / (model.eta_plus - lam)
                    + (1.0 - model.p_up) * model.eta_minus / (model.eta_minus + lam))
        return base + model.jump_intensity * (jump_mgf - 1.0)
    if fam is Family.STABLE:
        if lam != 0.0:
            raise DomainError("symmetric_stable has no exponential moments away from 0")
        return 0.0
    raise DomainError(f"unknown family {fam!r}")  # pragma: no cover


def default_step(r: float) -> float:
    """Default simulation step: one thousandth of the mean discount horizon."""
    return 1e-3 / r


def sample_horizon(r: float, rng: np.random.Generator) -> float:
    """One draw of the exponential killing horizon with rate r > 0."""
    if not r > 0:
        raise DomainError(f"discount rate must be > 0, got {r!r}")
    return float(rng.exponential(1.0 / r))


# -- grid paths --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SamplePath:
    """One simulated path on a time grid.

    `values[k]` is the right-continuous value at `times[k]`; every jump time
    of the finite-activity component appears in `times`, so each grid step
    contains at most the Gaussian movement plus a jump landing at its right
    endpoint.
    """

    times: np.ndarray
    values: np.ndarray
    jump_times: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class ExtremaSample:
    """Terminal value and running extrema of one path over [0, horizon]."""

    terminal: float
    running_max: float
    running_min: float


@dataclass(frozen=True, eq=False)
class ExtremaPool:
    """Column-wise pool of extrema samples (one row per replicate)."""

    terminal: np.ndarray
    running_max: np.ndarray
    running_min: np.ndarray

    def __len__(self) -> int:
        return len(self.terminal)

    def __getitem__(self, k: int) -> ExtremaSample:
        return ExtremaSample(float(self.terminal[k]), float(self.running_max[k]),
                             float(self.running_min[k]))


def _poisson_arrivals(rate: float, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Exact jump arrival times in (0, horizon) as cumulative exponential gaps."""
    if rate <= 0.0:
        return np.empty(0)
    gaps = []
    t = 0.0
    block = max(8, int(rate * horizon) + 8)
    while True:
        draw = rng.exponential(1.0 / rate, size=block)
        cum = t + np.cumsum(draw)
        over = np.searchsorted(cum, horizon, side="left")
        gaps.append(cum[:over])
        if over < len(cum):
            return np.concatenate(gaps) if gaps else np.empty(0)
        t = cum[-1]


def _jump_sizes(model: LevyModel, n: int, rng: np.random.Generator) -> np.ndarray:
    if model.family is Family.MERTON:
        return rng.normal(model.jump_mean, model.jump_sd, size=n)
    # kou: upward Exp(eta_plus) w.p. p_up, else downward Exp(eta_minus)
    up = rng.random(n) < model.p_up
    mag = rng.exponential(1.0, size=n)
    return np.where(up, mag / model.eta_plus, -mag / model.eta_minus)


def _stable_standard(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    # Chambers-Mallows-Stuck for the symmetric standard alpha-stable law.
    phi = (rng.random(n) - 0.5) * math.pi
    w = rng.exponential(1.0, size=n)
    return (np.sin(alpha * phi) / np.cos(phi) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha))


def sample_path(model: LevyModel, horizon: float, step: float,
                rng: np.random.Generator) -> SamplePath:
    """Simulate one path on [0, horizon] with target grid spacing `step`.

    The grid is the regular lattice merged with the exact jump arrival times;
    the final grid point equals the horizon.  Gaussian increments are exact
    for each segment; values at jump times include the jump (right limits).
    """
    if not horizon > 0:
        raise DomainError(f"horizon must be > 0, got {horizon!r}")
    if not step > 0:
        raise DomainError(f"step must be > 0, got {step!r}")
    n_steps = max(1, math.ceil(horizon / step))
    grid = np.minimum(np.arange(n_steps + 1, dtype=float) * step, horizon)
    grid[-1] = horizon

    if model.family in (Family.MERTON, Family.KOU):
        jump_times = _poisson_arrivals(model.jump_intensity, horizon, rng)
    else:
        jump_times = np.empty(0)

    times = np.union1d(grid, jump_times)
    dt = np.diff(times)
    if model.family is Family.STABLE:
        inc = (model.mu * dt
               + model.stable_scale * dt ** (1.0 / model.stable_index)
               * _stable_standard(model.stable_index, len(dt), rng))
    else:
        inc = model.mu * dt + model.sigma * np.sqrt(dt) * rng.standard_normal(len(dt))
    if len(jump_times):
        sizes = _jump_sizes(model, len(jump_times), rng)
        at = np.searchsorted(times, jump_times)
        np.add.at(inc, at - 1, sizes)  # jump lands at the right endpoint of its segment

    values = np.empty(len(times))
    values[0] = 0.0
    np.cumsum(inc, out=values[1:])
    return SamplePath(times=times, values=values, jump_times=jump_times)


def path_extrema(path: SamplePath) -> ExtremaSample:
    """Terminal value and running max/min over the stored grid values.

    Grid extrema understate the true continuous-time extrema by O(sqrt(step))
    for diffusive models; `sample_extrema` avoids that bias where it matters.
    """
    v = path.values
    return ExtremaSample(terminal=float(v[-1]), running_max=float(v.max()),
                         running_min=float(v.min()))


# -- exact extrema at an exponential horizon ---------------------------------


def _bridge_extrema(x0, x1, var, rng):
    """Per-segment running max and min of a Brownian segment given endpoints.

    Conditional on the endpoints, max and min each follow the Brownian-bridge
    law (inverted via one uniform each); they are drawn independently of each
    other, which preserves both marginals, the pairing with the endpoints,
    and therefore the law of the running max and of the running min of the
    whole path.  var = sigma^2 * dt per segment (0 gives the endpoint extrema).
    """
    d = x1 - x0
    s = x0 + x1
    lu1 = np.log1p(-rng.random(len(d)))
    lu2 = np.log1p(-rng.random(len(d)))
    seg_max = 0.5 * (s + np.sqrt(d * d - 2.0 * var * lu1))
    seg_min = 0.5 * (s - np.sqrt(d * d - 2.0 * var * lu2))
    return seg_max, seg_min


def _extrema_chunk_diffusive(model: LevyModel, r: float, n: int,
                             rng: np.random.Generator):
    """Exact (terminal, max, min) draws at an Exp(r) horizon; no grid bias.

    Horizon first, then the path: each replicate alternates Brownian segments
    with jump arrivals until the horizon; segment extrema come from the
    bridge law, so the result is exact in law for every diffusive family.
    """
    horizon = rng.exponential(1.0 / r, size=n)
    x = np.zeros(n)
    m = np.zeros(n)
    i = np.zeros(n)
    t = np.zeros(n)
    active = np.ones(n, dtype=bool)
    q = model.jump_intensity
    sig2 = model.sigma ** 2
    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        k = idx.size
        gap = rng.exponential(1.0 / q, size=k) if q > 0.0 else np.full(k, np.inf)
        seg_end = np.minimum(t[idx] + gap, horizon[idx])
        dt = seg_end - t[idx]
        z = rng.standard_normal(k)
        x0 = x[idx]
        x1 = x0 + model.mu * dt + model.sigma * np.sqrt(dt) * z
        seg_max, seg_min = _bridge_extrema(x0, x1, sig2 * dt, rng)
        np.maximum.at(m, idx, seg_max)
        np.minimum.at(i, idx, seg_min)

        done = seg_end >= horizon[idx]
        if q > 0.0:
            jumping = ~done
            nj = int(jumping.sum())
            if nj:
                x1 = x1.copy()
                x1[jumping] += _jump_sizes(model, nj, rng)
        x[idx] = x1
        np.maximum.at(m, idx, x1)
        np.minimum.at(i, idx, x1)
        t[idx] = seg_end
        active[idx[done]] = False
    return x, m, i


def _extrema_chunk_stable(model: LevyModel, r: float, n: int, step: float,
                          rng: np.random.Generator):
    """Grid-based (terminal, max, min) draws for the stable family.

    Running extrema over the lattice understate the continuous extrema; the
    bias vanishes as the step shrinks but is not corrected here (there is no
    bridge law to invert in closed form).
    """
    horizon = rng.exponential(1.0 / r, size=n)
    x = np.zeros(n)
    m = np.zeros(n)
    i = np.zeros(n)
    t = np.zeros(n)
    active = np.ones(n, dtype=bool)
    alpha = model.stable_index
    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        k = idx.size
        remaining = horizon[idx] - t[idx]
        final = remaining <= step
        dt = np.where(final, remaining, step)
        s = _stable_standard(alpha, k, rng)
        x1 = x[idx] + model.mu * dt + model.stable_scale * dt ** (1.0 / alpha) * s
        x[idx] = x1
        np.maximum.at(m, idx, x1)
        np.minimum.at(i, idx, x1)
        t[idx] = np.where(final, horizon[idx], t[idx] + step)
        active[idx[final]] = False
    return x, m, i


def sample_extrema(model: LevyModel, r: float, n: int, rng: np.random.Generator,
                   *, step: float | None = None, workers: int = 1) -> ExtremaPool:
    """n independent (terminal, running max, running min) draws at Exp(r) horizons.

    Exact in law for brownian_drift, merton, and kou (bridge-sampled segment
    extrema); grid-based with spacing `step` (default 1e-3/r) for
    symmetric_stable.  Replicates are generated in fixed-size chunks, each
    chunk from its own spawned substream, so results depend only on `rng`'s
    seed and `n`, never on `workers`.
    """
    if not r > 0:
        raise DomainError(f"discount rate must be > 0, got {r!r}")
    if n <= 0:
        raise DomainError(f"sample size must be > 0, got {n!r}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers!r}")
    if step is None:
        step = default_step(r)
    n_chunks = (n + _CHUNK - 1) // _CHUNK
    children = rng.spawn(n_chunks)
    x = np.empty(n)
    m = np.empty(n)
    i = np.empty(n)

    def run(ci: int) -> None:
        lo = ci * _CHUNK
        hi = min(lo + _CHUNK, n)
        sub = children[ci]
        if model.family is Family.STABLE:
            xc, mc, ic = _extrema_chunk_stable(model, r, hi - lo, step, sub)
        else:
            xc, mc, ic = _extrema_chunk_diffusive(model, r, hi - lo, sub)
        x[lo:hi], m[lo:hi], i[lo:hi] = xc, mc, ic

    if workers == 1 or n_chunks == 1:
        for ci in range(n_chunks):
            run(ci)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(n_chunks)))
    return ExtremaPool(terminal=x, running_max=m, running_min=i)

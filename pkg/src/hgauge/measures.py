"""Gauge-radial measure families and Markov chain samplers.

A family picks a profile g and the measure is dmu = e^{-g(N)} / Z dlambda.
The four families:

    power        g(N) = N^k,               k >= 4
    cosh-power   g(N) = cosh(N^k),         k >= 1
    power-log    g(N) = N^k log(N + 1),    k >= 3
    alpha-power  g(N) = a N^p,             a > 0, p >= 4, 0 < beta <= (p-3)/p

The carre-du-champ weight eta(N) = g'(N) / N^2 drives the coercive
inequalities; its empirical mean anchors the feasibility grids.

Two families of sufficient conditions are exposed as grid checks:

    slope condition      g''(N) <= g'(N)^2 on a gauge grid
    lsi conditions       g' nondecreasing, g(N) <= (c g'(N)/N^2)^(1/beta),
                         and g''(N) < d g'(N)^2, all on {N >= 1}

The samplers are plain random-walk Metropolis (default) and MALA on the
(2n+1)-dimensional coordinate space.  Chains are reproducible: chain i of a
seeded run always consumes the i-th spawn of the seed sequence, whether run
alone or as part of run_chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .group import GroupParams, Point
from .inequalities import InequalityReport
from .norm import norm_batch, partials_batch

__all__ = [
    "MeasureSpec",
    "SamplerConfig",
    "SampleBatch",
    "g_value",
    "g_prime",
    "g_second",
    "eta_weight",
    "eta_profile",
    "log_density",
    "grad_log_density",
    "check_slope_condition",
    "check_lsi_conditions",
    "condition_grid_start",
    "run_chain",
    "run_chains",
    "batch_means_se",
]

FAMILIES = ("power", "cosh-power", "power-log", "alpha-power")


@dataclass(frozen=True)
class MeasureSpec:
    """One measure dmu = e^{-g(N)}/Z dlambda with integrability exponent q."""

    family: str
    k: Optional[float] = None
    alpha: Optional[float] = None
    p: Optional[float] = None
    beta: Optional[float] = None
    q: float = 2.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown family {self.family!r}; choose from {FAMILIES}.")
        if self.q < 2:
            raise ValueError(f"Need q >= 2, got {self.q}.")
        if self.family == "power":
            if self.k is None or self.k < 4:
                raise ValueError(f"power family needs k >= 4, got {self.k}.")
        elif self.family == "cosh-power":
            if self.k is None or self.k < 1:
                raise ValueError(f"cosh-power family needs k >= 1, got {self.k}.")
        elif self.family == "power-log":
            if self.k is None or self.k < 3:
                raise ValueError(f"power-log family needs k >= 3, got {self.k}.")
        else:
            if self.alpha is None or self.alpha <= 0:
                raise ValueError(f"alpha-power family needs alpha > 0, got {self.alpha}.")
            if self.p is None or self.p < 4:
                raise ValueError(f"alpha-power family needs p >= 4, got {self.p}.")
            if self.beta is None or not (0 < self.beta <= (self.p - 3) / self.p):
                raise ValueError(
                    f"alpha-power family needs 0 < beta <= (p-3)/p, got beta={self.beta}."
                )

    def label(self) -> str:
        if self.family == "alpha-power":
            return f"alpha-power(alpha={self.alpha}, p={self.p}, beta={self.beta})"
        return f"{self.family}(k={self.k})"


def g_value(spec: MeasureSpec, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if spec.family == "power":
        return r ** spec.k
    if spec.family == "cosh-power":
        return np.cosh(r ** spec.k)
    if spec.family == "power-log":
        return r ** spec.k * np.log1p(r)
    return spec.alpha * r ** spec.p


def g_prime(spec: MeasureSpec, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    k = spec.k
    if spec.family == "power":
        return k * r ** (k - 1)
    if spec.family == "cosh-power":
        return k * r ** (k - 1) * np.sinh(r ** k)
    if spec.family == "power-log":
        return k * r ** (k - 1) * np.log1p(r) + r ** k / (1.0 + r)
    return spec.alpha * spec.p * r ** (spec.p - 1)


def g_second(spec: MeasureSpec, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    k = spec.k
    if spec.family == "power":
        return k * (k - 1) * r ** (k - 2)
    if spec.family == "cosh-power":
        rk = r ** k
        return k * (k - 1) * r ** (k - 2) * np.sinh(rk) + (k * r ** (k - 1)) ** 2 * np.cosh(rk)
    if spec.family == "power-log":
        return (
            k * (k - 1) * r ** (k - 2) * np.log1p(r)
            + 2.0 * k * r ** (k - 1) / (1.0 + r)
            - r ** k / (1.0 + r) ** 2
        )
    return spec.alpha * spec.p * (spec.p - 1) * r ** (spec.p - 2)


def slope_ratio(spec: MeasureSpec, r: np.ndarray) -> np.ndarray:
    """g''(N) / g'(N)^2 on the grid.

    The cosh family needs a dedicated branch: sinh(N^k) overflows float64
    near N^k ~ 710 while the ratio itself decays to zero, so it is evaluated
    through csch and coth in the e^(-z) domain.
    """
    r = np.asarray(r, dtype=float)
    if spec.family == "cosh-power":
        k = spec.k
        z = r ** k
        ez = np.exp(-z)
        denom = 1.0 - ez * ez
        csch = 2.0 * ez / denom
        coth = (1.0 + ez * ez) / denom
        return ((k - 1.0) / (k * z)) * csch + coth * csch
    gp = g_prime(spec, r)
    return g_second(spec, r) / (gp * gp)


def eta_weight(spec: MeasureSpec, r: np.ndarray) -> np.ndarray:
    """The carre-du-champ weight eta(N) = g'(N) / N^2."""
    r = np.asarray(r, dtype=float)
    return g_prime(spec, r) / (r * r)


def eta_profile(spec: MeasureSpec, radii: np.ndarray) -> np.ndarray:
    """eta sampled on a radius grid; diagnostic for the small-N behaviour.

    For power(k) this is k N^(k-3), so the profile stays bounded near the
    origin only once k >= 3; the profile is recorded, not asserted.
    """
    return eta_weight(spec, radii)


def log_density(spec: MeasureSpec, p: Point, params: GroupParams) -> float:
    """log of the unnormalised density, -g(N(p))."""
    if p.n != params.n:
        raise ValueError("Point/params dimension mismatch.")
    val = norm_batch(p.x[None, :], np.asarray([p.t]))[0]
    return float(-g_value(spec, val))


def grad_log_density(spec: MeasureSpec, p: Point, params: GroupParams) -> np.ndarray:
    """Euclidean gradient of the log density: -g'(N) (dN/dx_1, ..., dN/dt)."""
    if not np.any(p.x):
        raise ValueError("grad_log_density is undefined on the central line x = 0.")
    pb = partials_batch(p.x[None, :], np.asarray([p.t]))
    gp = float(g_prime(spec, pb.N[0]))
    return -gp * np.concatenate([pb.dN_dx[0], [pb.dN_dt[0]]])


# -- condition grids ---------------------------------------------------------


def condition_grid_start(spec: MeasureSpec) -> float:
    """Left endpoint from which the slope condition holds for the family.

    power: from 1.  cosh-power: from 3/2 (cosh N >= golden ratio fails below
    ~1.0612 for k = 1).  power-log: from 1.05; the condition genuinely fails
    on a short interval at the left end of {N >= 1} (for k = 3 it crosses
    near N ~ 1.0103), and 1.05 clears the crossing for k up to 20.
    alpha-power: from 1.
    """
    if spec.family == "cosh-power":
        return 1.5
    if spec.family == "power-log":
        return 1.05
    return 1.0


def check_slope_condition(spec: MeasureSpec, n_grid: np.ndarray) -> InequalityReport:
    """g'(N)^2 - g''(N) >= 0 on the given grid, normalised by g'(N)^2."""
    r = np.asarray(n_grid, dtype=float)
    if np.any(r <= 0):
        raise ValueError("Grid radii must be positive.")
    margins = 1.0 - slope_ratio(spec, r)
    worst = int(np.argmin(margins))
    return InequalityReport(
        name="slope-condition",
        n_points=r.size,
        min_margin=float(margins[worst]),
        worst_point=float(r[worst]),
        tolerance=0.0,
        passed=bool(margins[worst] >= 0.0),
    )


def check_lsi_conditions(
    spec: MeasureSpec, n_grid: np.ndarray, c: float, d: float
) -> InequalityReport:
    """The three grid conditions behind the q log-Sobolev bound.

    Margins (all scale-free): relative increments of g', the ratio
    1 - g / (c g'/N^2)^(1/beta), and 1 - g'' / (d g'^2).  The report carries
    the worst of the three.
    """
    if spec.beta is None:
        raise ValueError("LSI conditions need a family with a beta exponent.")
    if not (c > 0 and d > 0):
        raise ValueError("Need c > 0 and d > 0.")
    r = np.sort(np.asarray(n_grid, dtype=float))
    if np.any(r < 1.0):
        raise ValueError("LSI condition grid lives on {N >= 1}.")
    gp = g_prime(spec, r)
    gv = g_value(spec, r)
    gs = g_second(spec, r)

    inc = np.diff(gp) / np.abs(gp[:-1])
    dominating = (c * gp / (r * r)) ** (1.0 / spec.beta)
    m_grow = 1.0 - gv / dominating
    m_curv = 1.0 - gs / (d * gp * gp)

    candidates = [
        ("monotone-slope", inc, r[:-1]),
        ("beta-growth", m_grow, r),
        ("curvature", m_curv, r),
    ]
    worst_name, worst_margin, worst_r = None, np.inf, None
    for name, vals, grid in candidates:
        i = int(np.argmin(vals))
        if vals[i] < worst_margin:
            worst_name, worst_margin, worst_r = name, float(vals[i]), float(grid[i])
    return InequalityReport(
        name=f"lsi-conditions({worst_name})",
        n_points=r.size,
        min_margin=worst_margin,
        worst_point=worst_r,
        tolerance=0.0,
        passed=bool(worst_margin > 0.0),
    )


# -- samplers -----------------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    """Random-walk Metropolis / MALA settings.

    Args:
        n_steps: total steps including burn-in.
        burn_in: steps discarded; the step size is tuned only here.
        step: initial proposal scale.
        seed: seed for the chain seed-sequence.
        n_chains: number of independent chains (spawned streams).
        algorithm: "rwm" or "mala".
    """

    n_steps: int = 110_000
    burn_in: int = 10_000
    step: float = 0.25
    seed: int = 0
    n_chains: int = 1
    algorithm: str = "rwm"

    def __post_init__(self) -> None:
        if self.algorithm not in ("rwm", "mala"):
            raise ValueError(f"Unknown algorithm {self.algorithm!r}.")
        if not (0 <= self.burn_in < self.n_steps):
            raise ValueError("Need 0 <= burn_in < n_steps.")
        if not self.step > 0:
            raise ValueError("Need step > 0.")
        if self.n_chains < 1:
            raise ValueError("Need n_chains >= 1.")


@dataclass(frozen=True)
class SampleBatch:
    """Post-burn-in draws of one chain."""

    coords: np.ndarray        # (m, 2n+1)
    log_densities: np.ndarray  # (m,) unnormalised
    acceptance_rate: float
    chain_index: int
    step_final: float

    @property
    def n(self) -> int:
        return (self.coords.shape[1] - 1) // 2

    def norms(self) -> np.ndarray:
        return norm_batch(self.coords[:, :-1], self.coords[:, -1])

    def points(self) -> Iterator[Point]:
        for row in self.coords:
            yield Point(row[:-1], float(row[-1]))


def _log_pi_rows(spec: MeasureSpec, coords: np.ndarray) -> np.ndarray:
    return -g_value(spec, norm_batch(coords[:, :-1], coords[:, -1]))


def _grad_log_pi_rows(spec: MeasureSpec, coords: np.ndarray) -> np.ndarray:
    pb = partials_batch(coords[:, :-1], coords[:, -1])
    gp = g_prime(spec, pb.N)
    grad = np.concatenate([pb.dN_dx, pb.dN_dt[:, None]], axis=1)
    return -gp[:, None] * grad


TUNE_INTERVAL = 200
TARGET_ACCEPT = 0.25


def run_chain(
    spec: MeasureSpec,
    params: GroupParams,
    cfg: SamplerConfig,
    chain_index: int = 0,
) -> SampleBatch:
    """Run one chain; deterministic given (cfg.seed, chain_index).

    The proposal scale is tuned toward 25% acceptance during burn-in and
    frozen afterwards.  A post-burn-in acceptance rate outside [0.02, 0.98]
    raises, signalling a mis-tuned step.
    """
    if not 0 <= chain_index < cfg.n_chains:
        raise ValueError(f"chain_index {chain_index} outside 0..{cfg.n_chains - 1}.")
    stream = np.random.SeedSequence(cfg.seed).spawn(cfg.n_chains)[chain_index]
    rng = np.random.default_rng(stream)
    dim = params.ambient_dim

    state = rng.standard_normal(dim)
    if not np.any(state[:-1]):
        state[0] = 1.0  # keep MALA gradients defined
    step = cfg.step
    mala = cfg.algorithm == "mala"

    normals = rng.standard_normal((cfg.n_steps, dim))
    log_us = np.log(rng.random(cfg.n_steps))

    kept = np.empty((cfg.n_steps - cfg.burn_in, dim))
    kept_logpi = np.empty(cfg.n_steps - cfg.burn_in)
    logpi = float(_log_pi_rows(spec, state[None, :])[0])
    if mala:
        grad = _grad_log_pi_rows(spec, state[None, :])[0]

    accepted_window = 0
    accepted_main = 0
    for i in range(cfg.n_steps):
        if mala:
            drift = state + 0.5 * step * step * grad
            prop = drift + step * normals[i]
            if not np.any(prop[:-1]):
                accept = False  # central line: reject outright
            else:
                prop_logpi = float(_log_pi_rows(spec, prop[None, :])[0])
                prop_grad = _grad_log_pi_rows(spec, prop[None, :])[0]
                back = prop + 0.5 * step * step * prop_grad
                fwd_q = -float(np.sum((prop - drift) ** 2)) / (2.0 * step * step)
                back_q = -float(np.sum((state - back) ** 2)) / (2.0 * step * step)
                accept = log_us[i] < prop_logpi - logpi + back_q - fwd_q
        else:
            prop = state + step * normals[i]
            prop_logpi = float(_log_pi_rows(spec, prop[None, :])[0])
            accept = log_us[i] < prop_logpi - logpi

        if accept:
            state = prop
            logpi = prop_logpi
            if mala:
                grad = prop_grad
            accepted_window += 1
            if i >= cfg.burn_in:
                accepted_main += 1

        if i < cfg.burn_in and (i + 1) % TUNE_INTERVAL == 0:
            rate = accepted_window / TUNE_INTERVAL
            step *= math.exp(0.5 * (rate - TARGET_ACCEPT))
            accepted_window = 0
        elif i == cfg.burn_in - 1:
            accepted_window = 0

        if i >= cfg.burn_in:
            kept[i - cfg.burn_in] = state
            kept_logpi[i - cfg.burn_in] = logpi

    rate = accepted_main / (cfg.n_steps - cfg.burn_in)
    if not 0.02 <= rate <= 0.98:
        raise RuntimeError(
            f"Acceptance rate {rate:.3f} outside [0.02, 0.98]; step mis-tuned."
        )
    return SampleBatch(
        coords=kept,
        log_densities=kept_logpi,
        acceptance_rate=rate,
        chain_index=chain_index,
        step_final=step,
    )


def run_chains(spec: MeasureSpec, params: GroupParams, cfg: SamplerConfig) -> list[SampleBatch]:
    return [run_chain(spec, params, cfg, i) for i in range(cfg.n_chains)]


def batch_means_se(values: np.ndarray, n_batches: int = 50) -> float:
    """Batch-means standard error for a stationary chain functional."""
    values = np.asarray(values, dtype=float)
    if values.size < 2 * n_batches:
        raise ValueError(f"Need at least {2 * n_batches} values for {n_batches} batches.")
    usable = values.size - values.size % n_batches
    means = values[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))

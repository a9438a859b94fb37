"""Fundamental solution of the sub-Laplacian: integral oracle and closed form.

The starting point is the heat-kernel representation of the fundamental
solution u at a point with quadratics (A, B) and central coordinate t.  After
substituting u = csch(tau/2) the representation becomes the real integral

    u(A, B, t) = Gamma(n)/(2 pi)^n * Re I_n,
    I_n = int_0^inf s^(2n-2) / (A s^2 + 2B - 2 i t sqrt(1+s^2))^n ds.

For n = 2 the integral evaluates in closed form.  Splitting Re I_2 into a
modulus piece and a phase correction,

    I_modulus = int_0^inf s^2 / ((A s^2 + 2B)^2 + 4 t^2 (1+s^2)) ds
              = pi / (4 A sqrt(D)),
    Re I_2 = I_modulus + t * d/dt I_modulus = pi E^2 / (8 W D^(3/2)),

with W = sqrt(B^2 + t^2), E = B + W, D = A E + t^2.  The modulus quartic
A^2 z^4 + (4AB + 4t^2) z^2 + 4B^2 + 4t^2 has purely imaginary roots
+- i y_1, +- i y_2 (the constraint 2B >= A keeps its discriminant in z^2
nonnegative), and the residue sum gives I_modulus = pi / (2 A^2 (y_1+y_2)),
i.e. ((y_1+y_2)/2)^2 = D / A^2.  Differentiating n - 2 times in A produces
the general closed form

    u = K_n * E^n / (W * D^(n - 1/2)),
    K_n = (prod_{k=3}^{n} (2k-3)) / (2 * pi^(n-1) * 2^(2n)),

so that u * N^(2n) = K_n identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .group import GroupParams, Point
from .norm import ab_quantities, norm_N

__all__ = [
    "QuadratureConfig",
    "BggEval",
    "csch_weight",
    "phase_quadratic",
    "modulus_integral",
    "modulus_integral_quad",
    "phase_correction_quad",
    "real_part_integral",
    "real_part_integral_quad",
    "pole_imag_mean_sq",
    "solution_constant",
    "fundamental_solution_quad",
    "fundamental_solution_closed",
    "bgg_eval",
    "compare_cloud",
]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-30
    max_subdivisions: int = 200
    split_point: float = 1.0  # [0, split] direct, tail via s -> 1/s

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("Quadrature tolerances must be positive.")
        if self.max_subdivisions < 10 or not self.split_point > 0:
            raise ValueError("Bad quadrature configuration.")


class QuadratureError(RuntimeError):
    pass


def _quad(f: Callable[[float], float], lo: float, hi: float, cfg: QuadratureConfig) -> float:
    out = quad(
        f, lo, hi,
        epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions, full_output=1,
    )
    val, err = out[0], out[1]
    if len(out) > 3 and err > 1e-6 * max(abs(val), 1e-300):
        raise QuadratureError(f"Quadrature did not converge: {out[3]}")
    return val


def _integrate_half_line(f: Callable[[float], float], cfg: QuadratureConfig) -> float:
    """int_0^inf f, split at cfg.split_point with an inversion of the tail."""
    head = _quad(f, 0.0, cfg.split_point, cfg)
    tail = _quad(lambda v: f(1.0 / v) / (v * v), 0.0, 1.0 / cfg.split_point, cfg)
    return head + tail


def _ipow(z: complex, n: int) -> complex:
    out = 1.0 + 0.0j
    for _ in range(n):
        out *= z
    return out


def csch_weight(tau: float, n: int) -> float:
    """(tau^n / 2) csch(tau/2) csch(tau)^(n-1); even, positive, 1 at tau = 0."""
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}.")
    a = abs(tau)
    if a == 0.0:
        return 1.0
    if a < 1e-5:
        # tau/sinh(tau) = 1 - tau^2/6 + O(tau^4)
        half = 1.0 - (a / 2.0) ** 2 / 6.0
        full = 1.0 - a * a / 6.0
        return 0.5 * (2.0 * half) * full ** (n - 1)
    if a > 30.0:
        # log csch a = log 2 - a - log1p(-exp(-2a))
        log_csch_half = math.log(2.0) - a / 2.0 - math.log1p(-math.exp(-a))
        log_csch_full = math.log(2.0) - a - math.log1p(-math.exp(-2.0 * a))
        return math.exp(
            n * math.log(a) - math.log(2.0) + log_csch_half + (n - 1) * log_csch_full
        )
    return (a ** n / 2.0) / (math.sinh(a / 2.0) * math.sinh(a) ** (n - 1))


def _tau_coth(tau: float, half: bool = False) -> float:
    """tau*coth(tau/2) if half else tau*coth(tau); limits 2 and 1 at tau = 0."""
    a = abs(tau)
    s = a / 2.0 if half else a
    if s < 1e-6:
        # s*coth(s) = 1 + s^2/3 + O(s^4); rescale for the half case
        base = 1.0 + s * s / 3.0
        return 2.0 * base if half else base
    val = s / math.tanh(s)
    return 2.0 * val if half else val


def phase_quadratic(a: float, b: float, t: float, tau: float) -> complex:
    """Complex phase tau*coth(tau/2)(A-B) + tau*coth(tau)(2B-A) - i*t*tau.

    Real part tends to A as tau -> 0 and collapses to tau*coth(tau/2)*B when
    A = 2B (isotropic slice).
    """
    if b < 0 or a < b or a > 2 * b + 1e-12 * abs(b):
        raise ValueError(f"Quadratics must satisfy 0 <= B <= A <= 2B, got A={a}, B={b}.")
    return _tau_coth(tau, half=True) * (a - b) + _tau_coth(tau) * (2 * b - a) - 1j * t * tau


def _check_ab(a: float, b: float) -> None:
    if not (a > 0 and b > 0 and b <= a <= 2 * b * (1 + 1e-12)):
        raise ValueError(f"Need 0 < B <= A <= 2B, got A={a}, B={b}.")


def _wed(a: float, b: float, t: float) -> tuple[float, float, float]:
    w = math.hypot(b, t)
    e = b + w
    d = a * e + t * t
    return w, e, d


def modulus_integral(a: float, b: float, t: float) -> float:
    """Closed form pi / (4 A sqrt(D)) of the modulus piece."""
    _check_ab(a, b)
    _, _, d = _wed(a, b, t)
    return math.pi / (4.0 * a * math.sqrt(d))


def modulus_integral_quad(a: float, b: float, t: float, cfg: QuadratureConfig) -> float:
    _check_ab(a, b)

    def f(s: float) -> float:
        q = a * s * s + 2.0 * b
        return s * s / (q * q + 4.0 * t * t * (1.0 + s * s))

    return _integrate_half_line(f, cfg)


def phase_correction_quad(a: float, b: float, t: float, cfg: QuadratureConfig) -> float:
    """The part subtracted from the modulus piece to give Re I_2."""
    _check_ab(a, b)

    def f(s: float) -> float:
        s2 = s * s
        q = a * s2 + 2.0 * b
        den = q * q + 4.0 * t * t * (1.0 + s2)
        return 8.0 * t * t * (1.0 + s2) * s2 / (den * den)

    return _integrate_half_line(f, cfg)


def real_part_integral(a: float, b: float, t: float) -> float:
    """Closed form Re I_2 = pi E^2 / (8 W D^(3/2))."""
    _check_ab(a, b)
    w, e, d = _wed(a, b, t)
    return math.pi * e * e / (8.0 * w * d ** 1.5)


def real_part_integral_quad(a: float, b: float, t: float, cfg: QuadratureConfig) -> float:
    _check_ab(a, b)

    def f(s: float) -> float:
        z = a * s * s + 2.0 * b - 2.0j * t * math.sqrt(1.0 + s * s)
        return (s * s / (z * z)).real

    return _integrate_half_line(f, cfg)


def pole_imag_mean_sq(a: float, b: float, t: float) -> float:
    """Squared mean imaginary part of the upper-half-plane modulus-quartic poles.

    Equals D / A^2; at t = 0 the two poles coincide at i sqrt(2B/A) and this
    is the squared imaginary part of that double pole.
    """
    _check_ab(a, b)
    _, _, d = _wed(a, b, t)
    return d / (a * a)


def solution_constant(n: int) -> float:
    """K_n with u = K_n E^n / (W D^(n-1/2)); equals 1/(32 pi) at n = 2."""
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}.")
    odd = math.prod(range(3, 2 * n - 2, 2)) if n >= 3 else 1
    return odd / (2.0 * math.pi ** (n - 1) * 2.0 ** (2 * n))


def fundamental_solution_quad(p: Point, params: GroupParams, cfg: QuadratureConfig) -> float:
    """Direct quadrature of the integral representation."""
    n = params.n
    a, b = ab_quantities(p)
    if not np.any(p.x):
        raise ValueError("Integral representation needs x != 0.")
    t = p.t
    pref = math.factorial(n - 1) / (2.0 * math.pi) ** n

    def head(s: float) -> float:
        z = a * s * s + 2.0 * b - 2.0j * t * math.sqrt(1.0 + s * s)
        return (s ** (2 * n - 2) / _ipow(z, n)).real

    # s -> 1/v: integrand becomes Re (A + 2B v^2 - 2 i t v sqrt(1+v^2))^(-n)
    def tail(v: float) -> float:
        z = a + 2.0 * b * v * v - 2.0j * t * v * math.sqrt(1.0 + v * v)
        return (1.0 / _ipow(z, n)).real

    val = _quad(head, 0.0, cfg.split_point, cfg) + _quad(
        tail, 0.0, 1.0 / cfg.split_point, cfg
    )
    return pref * val


def fundamental_solution_closed(p: Point, params: GroupParams) -> float:
    """Closed form K_n E^n / (W D^(n-1/2))."""
    if not np.any(p.x) and p.t == 0.0:
        raise ValueError("Fundamental solution is singular at the identity.")
    a, b = ab_quantities(p)
    t = p.t
    w, e, d = _wed(a, b, t)
    n = params.n
    ln = n * math.log(e) - math.log(w) - (n - 0.5) * math.log(d)
    return solution_constant(n) * math.exp(ln)


@dataclass(frozen=True)
class BggEval:
    """Quadrature and closed-form values at one point, with the n = 2 pieces."""

    quad: float
    closed: float
    core_closed: float          # Re I_2 for the point's (A, B, t)
    core_modulus: float         # closed modulus piece
    core_phase_correction: float  # quadrature of the phase correction
    pole_imag_mean_sq: float


def bgg_eval(p: Point, params: GroupParams, cfg: QuadratureConfig) -> BggEval:
    a, b = ab_quantities(p)
    t = p.t
    return BggEval(
        quad=fundamental_solution_quad(p, params, cfg),
        closed=fundamental_solution_closed(p, params),
        core_closed=real_part_integral(a, b, t),
        core_modulus=modulus_integral(a, b, t),
        core_phase_correction=phase_correction_quad(a, b, t, cfg),
        pole_imag_mean_sq=pole_imag_mean_sq(a, b, t),
    )


def compare_cloud(
    params: GroupParams,
    n_points: int,
    seed: int,
    cfg: QuadratureConfig,
    box: float = 5.0,
    t_max: float = 25.0,
    min_radius: float = 0.1,
) -> dict:
    """Quadrature vs closed form on a random cloud; returns an error summary."""
    rng = np.random.default_rng(seed)
    n = params.n
    rows = []
    while len(rows) < n_points:
        x = rng.uniform(-box, box, 2 * n)
        if np.linalg.norm(x) < min_radius:
            continue
        rows.append((x, rng.uniform(-t_max, t_max)))
    rel_errs = []
    worst = None
    for x, t in rows:
        p = Point(x, float(t))
        uq = fundamental_solution_quad(p, params, cfg)
        uc = fundamental_solution_closed(p, params)
        rel = abs(uq - uc) / abs(uc)
        rel_errs.append(rel)
        if worst is None or rel > worst[0]:
            worst = (rel, p)
    rel_errs = np.asarray(rel_errs)
    return {
        "n": n,
        "points": n_points,
        "seed": seed,
        "max_rel_err": float(np.max(rel_errs)),
        "mean_rel_err": float(np.mean(rel_errs)),
        "worst_point": [float(v) for v in worst[1].coords()],
    }

"""Group structure of the anisotropic Heisenberg group H_{2n}(1/2, 1).

Points live on R^{2n+1} with coordinates (x_1, ..., x_{2n}, t).  The pair
(x_1, x_{n+1}) carries symplectic weight 1/2, every remaining pair
(x_j, x_{j+n}) carries weight 1, and t is the central coordinate.  The
dilation delta_lam(x, t) = (lam x, lam^2 t) is a group automorphism, so the
homogeneous dimension is Q = 2n + 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "GroupParams",
    "Point",
    "SkewForm",
    "origin",
    "compose",
    "inverse",
    "dilate",
    "skew_form",
    "field_coefficients",
    "field_coefficients_batch",
    "horizontal_apply",
]


@dataclass(frozen=True)
class GroupParams:
    """Layer parameter n >= 2; the horizontal layer has dimension 2n."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"GroupParams requires an integer n >= 2, got {self.n!r}.")

    @property
    def horizontal_dim(self) -> int:
        return 2 * self.n

    @property
    def ambient_dim(self) -> int:
        return 2 * self.n + 1

    @property
    def homogeneous_dim(self) -> int:
        return 2 * self.n + 2


@dataclass(frozen=True, eq=False)
class Point:
    """A group element: horizontal part x (length 2n) and central part t."""

    x: np.ndarray
    t: float

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.x, other.x)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.t))

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 4 or x.size % 2 != 0:
            raise ValueError(
                f"Point.x must be a flat array of even length >= 4, got shape {x.shape}."
            )
        if not np.all(np.isfinite(x)) or not np.isfinite(self.t):
            raise ValueError("Point coordinates must be finite.")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.x.size // 2

    def coords(self) -> np.ndarray:
        """Flat coordinate vector (x_1, ..., x_{2n}, t)."""
        return np.concatenate([self.x, [self.t]])

    @staticmethod
    def from_coords(coords: Iterable[float]) -> "Point":
        arr = np.asarray(list(coords), dtype=float)
        return Point(arr[:-1], float(arr[-1]))


def origin(params: GroupParams) -> Point:
    """The group identity."""
    return Point(np.zeros(params.horizontal_dim), 0.0)


def _check_match(p: Point, q: Point) -> None:
    if p.n != q.n:
        raise ValueError(f"Dimension mismatch: n={p.n} vs n={q.n}.")


def compose(p: Point, q: Point) -> Point:
    """Group product p * q.

    The central coordinate picks up the twist eta . c(x), where c is the
    vector of central coefficients of the horizontal fields at x.
    """
    _check_match(p, q)
    twist = float(q.x @ field_coefficients(p))
    return Point(p.x + q.x, p.t + q.t + twist)


def inverse(p: Point) -> Point:
    """Group inverse; coordinate negation."""
    return Point(-p.x, -p.t)


def dilate(lam: float, p: Point) -> Point:
    """Anisotropic dilation delta_lam(x, t) = (lam x, lam^2 t), lam > 0."""
    if not lam > 0:
        raise ValueError(f"Dilation factor must be positive, got {lam}.")
    return Point(lam * p.x, lam * lam * p.t)


@dataclass(frozen=True)
class SkewForm:
    """Skew-symmetric matrix L with c(x) = L x for the central coefficients."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"SkewForm needs a square matrix, got shape {m.shape}.")
        if not np.array_equal(m, -m.T):
            raise ValueError("SkewForm matrix must be exactly skew-symmetric.")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2


def skew_form(params: GroupParams) -> SkewForm:
    """The form encoding the bracket: weight 1/2 on the (1, n+1) pair, 1 elsewhere."""
    n = params.n
    m = np.zeros((2 * n, 2 * n))
    m[0, n] = -0.5
    m[n, 0] = 0.5
    for j in range(1, n):
        m[j, j + n] = -1.0
        m[j + n, j] = 1.0
    return SkewForm(m)


def field_coefficients(p: Point) -> np.ndarray:
    """Central coefficients c_j(x) of the horizontal fields X_j = d_j + c_j d_t.

    c_1 = -x_{n+1}/2 and c_{n+1} = x_1/2 on the distinguished pair;
    c_j = -x_{j+n} and c_{j+n} = x_j on the remaining pairs.
    """
    return field_coefficients_batch(p.x[None, :])[0]


def field_coefficients_batch(x: np.ndarray) -> np.ndarray:
    """Vectorised field_coefficients for an (m, 2n) array of horizontal parts."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] // 2
    c = np.empty_like(x)
    c[..., 0] = -0.5 * x[..., n]
    c[..., n] = 0.5 * x[..., 0]
    c[..., 1:n] = -x[..., n + 1 : 2 * n]
    c[..., n + 1 : 2 * n] = x[..., 1:n]
    return c


def horizontal_apply(euclidean_grad: np.ndarray, p: Point) -> np.ndarray:
    """Convert a Euclidean gradient (2n+1 entries) to the horizontal gradient.

    X_j u = d_{x_j} u + c_j(x) d_t u for j = 1..2n.
    """
    g = np.asarray(euclidean_grad, dtype=float)
    if g.size != p.x.size + 1:
        raise ValueError(
            f"Gradient length {g.size} does not match ambient dimension {p.x.size + 1}."
        )
    return g[:-1] + field_coefficients(p) * g[-1]

"""Small geometric helpers shared across the package.

Everything here operates on plain numpy arrays; points are rows of shape
(..., 2).  The counter-clockwise quarter turn is used pervasively by the
duality machinery, so it gets a short name.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Box",
    "rotate90",
    "rotate90_inv",
    "quintic_smoothstep",
    "quintic_smoothstep_prime",
    "unit_directions",
    "gauss_legendre_2d",
]


def rotate90(p: np.ndarray) -> np.ndarray:
    """Counter-clockwise rotation by pi/2: (x, y) -> (-y, x)."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    out[..., 0] = -p[..., 1]
    out[..., 1] = p[..., 0]
    return out


def rotate90_inv(p: np.ndarray) -> np.ndarray:
    """Clockwise rotation by pi/2: (x, y) -> (y, -x)."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    out[..., 0] = p[..., 1]
    out[..., 1] = -p[..., 0]
    return out


def quintic_smoothstep(t: np.ndarray | float) -> np.ndarray | float:
    """C^2 step 0 -> 1 on [0, 1]: 10t^3 - 15t^4 + 6t^5, clamped outside."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def quintic_smoothstep_prime(t: np.ndarray | float) -> np.ndarray | float:
    """Derivative of the quintic step (zero outside [0, 1])."""
    tc = np.clip(t, 0.0, 1.0)
    inside = (np.asarray(t) >= 0.0) & (np.asarray(t) <= 1.0)
    return np.where(inside, 30.0 * tc * tc * (1.0 - tc) ** 2, 0.0)


def unit_directions(n: int) -> np.ndarray:
    """n unit vectors at angles 2*pi*k/n, k = 0..n-1.  Includes the axes
    whenever 4 | n, which matters for fields degenerate along an axis."""
    if n < 1:
        raise ValueError("need at least one direction")
    theta = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


def gauss_legendre_2d(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes/weights on [-1, 1]^2.

    Returns (nodes (order^2, 2), weights (order^2,)).
    """
    x, w = np.polynomial.legendre.leggauss(order)
    nx, ny = np.meshgrid(x, x, indexing="ij")
    wx, wy = np.meshgrid(w, w, indexing="ij")
    nodes = np.column_stack([nx.ravel(), ny.ravel()])
    return nodes, (wx * wy).ravel()


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle [lo[0], hi[0]] x [lo[1], hi[1]] of gradient space."""

    lo: tuple[float, float]
    hi: tuple[float, float]

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != (2,) or hi.shape != (2,):
            raise ValueError("Box corners must be planar points")
        if not np.all(hi > lo):
            raise ValueError(f"degenerate box: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", (float(lo[0]), float(lo[1])))
        object.__setattr__(self, "hi", (float(hi[0]), float(hi[1])))

    @classmethod
    def square(cls, half_width: float, center: tuple[float, float] = (0.0, 0.0)) -> "Box":
        c = np.asarray(center, dtype=float)
        h = float(half_width)
        return cls(tuple(c - h), tuple(c + h))

    @property
    def lo_arr(self) -> np.ndarray:
        return np.asarray(self.lo)

    @property
    def hi_arr(self) -> np.ndarray:
        return np.asarray(self.hi)

    @property
    def diameter(self) -> float:
        return float(np.hypot(*(self.hi_arr - self.lo_arr)))

    def contains(self, pts: np.ndarray, pad: float = 0.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        lo = self.lo_arr - pad
        hi = self.hi_arr + pad
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo_arr, self.hi_arr, size=(n, 2))

    def node_coords(self, h: float) -> tuple[np.ndarray, np.ndarray]:
        """1D node coordinates (xs, ys) of the lattice with spacing h.

        The lattice starts exactly at the lower corner; the upper corner is
        included when it is an integer number of cells away.
        """
        if h <= 0:
            raise ValueError("grid spacing must be positive")
        lo, hi = self.lo_arr, self.hi_arr
        nx = int(np.floor((hi[0] - lo[0]) / h + 1e-9)) + 1
        ny = int(np.floor((hi[1] - lo[1]) / h + 1e-9)) + 1
        return lo[0] + h * np.arange(nx), lo[1] + h * np.arange(ny)

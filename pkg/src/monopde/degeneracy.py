"""Classification of gradient space into elliptic / degenerate / singular parts.

A rectangular lattice over gradient space is labeled with ladder levels of
the lower and upper ellipticity quotients.  Nodes exhausting the lambda
ladder are flagged degenerate (the field loses ellipticity from below);
nodes exhausting the Lambda ladder are flagged singular (from above).  The
closure in the defining intersections is discretized by a one-cell
morphological closing, and distances to the flagged node sets come from an
exact Euclidean distance transform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .fields import (FieldDescriptor, default_lambda_ladder,
                     default_Lambda_ladder, default_radius_ladder,
                     quotient_samples)
from .geometry import Box

__all__ = ["DegeneracyGrid", "classify_grid", "dist_to_class", "hausdorff_distance"]

#: sentinel distance when a class is empty
INF_DIST = np.inf


@dataclass(frozen=True)
class DegeneracyGrid:
    """Node labels over a gradient-space lattice.

    o_level / v_level hold the index of the strongest ladder entry the node
    satisfies (-1 = none, i.e. ladder exhausted).  in_degenerate / in_singular
    are the raw exhaustion flags; degenerate_set / singular_set additionally
    apply the one-cell closing, and their intersection is the discrete bad
    set feeding dist_ds.  Distance channels are exact Euclidean distances
    between lattice nodes (INF sentinel when the class is empty).
    Node (i, j) sits at box.lo + (i*h, j*h); arrays are indexed [i, j].
    """

    box: Box
    h: float
    lambda_ladder: np.ndarray
    Lambda_ladder: np.ndarray
    d_quot: np.ndarray
    s_quot: np.ndarray
    o_level: np.ndarray
    v_level: np.ndarray
    in_degenerate: np.ndarray
    in_singular: np.ndarray
    degenerate_set: np.ndarray
    singular_set: np.ndarray
    ds_set: np.ndarray
    dist_d: np.ndarray
    dist_s: np.ndarray
    dist_ds: np.ndarray

    def __post_init__(self):
        for name in ("d_quot", "s_quot", "o_level", "v_level", "in_degenerate",
                     "in_singular", "degenerate_set", "singular_set", "ds_set",
                     "dist_d", "dist_s", "dist_ds"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.d_quot.shape

    def node_points(self) -> np.ndarray:
        xs, ys = self.box.node_coords(self.h)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def points_of(self, mask: np.ndarray) -> np.ndarray:
        """Coordinates of nodes where mask is True, shape (K, 2)."""
        idx = np.argwhere(mask)
        xs, ys = self.box.node_coords(self.h)
        return np.column_stack([xs[idx[:, 0]], ys[idx[:, 1]]])

    def is_empty(self, cls: str) -> bool:
        return not bool(np.any(self._mask(cls)))

    def _mask(self, cls: str) -> np.ndarray:
        try:
            return {"D": self.degenerate_set, "S": self.singular_set, "DS": self.ds_set}[cls]
        except KeyError:
            raise ValueError(f"unknown class {cls!r}; expected 'D', 'S' or 'DS'") from None

    def _dist(self, cls: str) -> np.ndarray:
        return {"D": self.dist_d, "S": self.dist_s, "DS": self.dist_ds}[cls]

    # -- serialization: header JSON + one CSV matrix per channel -------------

    def save(self, directory: str | Path) -> dict[str, str]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        header = {
            "box": {"lo": list(self.box.lo), "hi": list(self.box.hi)},
            "h_grid": self.h,
            "lambda_ladder": [float(v) for v in self.lambda_ladder],
            "Lambda_ladder": [float(v) for v in self.Lambda_ladder],
            "shape": list(self.shape),
            "layout": "row-major, node (i,j) at box.lo + (i*h, j*h)",
        }
        paths = {"header": str(directory / "grid.json")}
        (directory / "grid.json").write_text(json.dumps(header, indent=2) + "\n")
        channels = {
            "d_quot": self.d_quot, "s_quot": self.s_quot,
            "o_level": self.o_level, "v_level": self.v_level,
            "in_degenerate": self.in_degenerate.astype(int),
            "in_singular": self.in_singular.astype(int),
            "degenerate_set": self.degenerate_set.astype(int),
            "singular_set": self.singular_set.astype(int),
            "ds_set": self.ds_set.astype(int),
            "dist_d": self.dist_d, "dist_s": self.dist_s, "dist_ds": self.dist_ds,
        }
        for name, arr in channels.items():
            p = directory / f"{name}.csv"
            np.savetxt(p, np.asarray(arr, dtype=float), fmt="%.17g", delimiter=",")
            paths[name] = str(p)
        return paths


def _edt(mask: np.ndarray, h: float) -> np.ndarray:
    """Exact Euclidean distance from every node to the True set of mask."""
    if not np.any(mask):
        return np.full(mask.shape, INF_DIST)
    return ndimage.distance_transform_edt(~mask, sampling=h)


def classify_grid(field: FieldDescriptor, box: Box, h_grid: float,
                  lambda_ladder=None, Lambda_ladder=None,
                  radii=None, n_directions: int = 64) -> DegeneracyGrid:
    """Label every lattice node with its ellipticity ladder levels.

    A node belongs to level lambda of the lower ladder iff its sampled
    d-quotient is >= lambda, and to level Lambda of the upper ladder iff its
    s-quotient is >= 1/Lambda; exhaustion of a ladder flags the node
    degenerate resp. singular.  An empty bad set is a valid outcome and is
    reported through the INF distance sentinel.
    """
    lam = np.asarray(default_lambda_ladder() if lambda_ladder is None else lambda_ladder, float)
    Lam = np.asarray(default_Lambda_ladder() if Lambda_ladder is None else Lambda_ladder, float)
    if lam.size == 0 or Lam.size == 0:
        raise ValueError("ladders must be nonempty")
    if np.any(np.diff(lam) >= 0):
        raise ValueError("lambda ladder must be strictly decreasing")
    if np.any(np.diff(Lam) <= 0):
        raise ValueError("Lambda ladder must be strictly increasing")
    radii = default_radius_ladder() if radii is None else np.asarray(radii, float)

    xs, ys = box.node_coords(h_grid)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    d_flat, s_flat = quotient_samples(field, pts, radii, n_directions)
    shape = (len(xs), len(ys))
    d_quot = d_flat.reshape(shape)
    s_quot = s_flat.reshape(shape)

    # strongest satisfied level: lambda ladder is decreasing, so the first
    # (largest) lambda with d_quot >= lambda has the smallest index
    o_level = np.full(shape, -1, dtype=np.int16)
    for idx in range(len(lam) - 1, -1, -1):
        o_level[d_quot >= lam[idx]] = idx
    v_level = np.full(shape, -1, dtype=np.int16)
    for idx in range(len(Lam) - 1, -1, -1):
        v_level[s_quot >= 1.0 / Lam[idx]] = idx

    in_d = o_level < 0
    in_s = v_level < 0
    struct = np.ones((3, 3), dtype=bool)  # one-cell closing
    d_set = ndimage.binary_closing(in_d, structure=struct)
    s_set = ndimage.binary_closing(in_s, structure=struct)
    ds_set = d_set & s_set

    return DegeneracyGrid(
        box=box, h=h_grid, lambda_ladder=lam, Lambda_ladder=Lam,
        d_quot=d_quot, s_quot=s_quot, o_level=o_level, v_level=v_level,
        in_degenerate=in_d, in_singular=in_s,
        degenerate_set=d_set, singular_set=s_set, ds_set=ds_set,
        dist_d=_edt(d_set, h_grid), dist_s=_edt(s_set, h_grid),
        dist_ds=_edt(ds_set, h_grid),
    )


def dist_to_class(grid: DegeneracyGrid, point: np.ndarray, cls: str = "DS") -> float:
    """Bilinear interpolation of the distance transform at a gradient point.

    Returns the INF sentinel when the class is empty; raises for points
    outside the grid box.
    """
    point = np.asarray(point, dtype=float).reshape(2)
    if not bool(grid.box.contains(point)):
        raise ValueError(f"point {point} outside grid box {grid.box}")
    if grid.is_empty(cls):
        return INF_DIST
    return float(_bilinear(grid, grid._dist(cls), point.reshape(1, 2))[0])


def dist_to_class_batch(grid: DegeneracyGrid, pts: np.ndarray, cls: str = "DS") -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if grid.is_empty(cls):
        return np.full(pts.shape[0], INF_DIST)
    inside = grid.box.contains(pts)
    if not np.all(inside):
        raise ValueError(f"{np.count_nonzero(~inside)} points outside grid box")
    return _bilinear(grid, grid._dist(cls), pts)


def _bilinear(grid: DegeneracyGrid, arr: np.ndarray, pts: np.ndarray) -> np.ndarray:
    lo = grid.box.lo_arr
    fi = (pts[:, 0] - lo[0]) / grid.h
    fj = (pts[:, 1] - lo[1]) / grid.h
    ni, nj = arr.shape
    i0 = np.clip(np.floor(fi).astype(int), 0, ni - 2)
    j0 = np.clip(np.floor(fj).astype(int), 0, nj - 2)
    wi = np.clip(fi - i0, 0.0, 1.0)
    wj = np.clip(fj - j0, 0.0, 1.0)
    return ((1 - wi) * (1 - wj) * arr[i0, j0] + wi * (1 - wj) * arr[i0 + 1, j0]
            + (1 - wi) * wj * arr[i0, j0 + 1] + wi * wj * arr[i0 + 1, j0 + 1])


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    from scipy.spatial import cKDTree

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        return INF_DIST
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))

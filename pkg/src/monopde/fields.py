"""Continuous strictly monotone planar vector fields.

A field G maps gradient space R^2 into itself with
    <G(xi) - G(zeta), xi - zeta> > 0   for xi != zeta.
This module provides the builtin catalogue (identity-scaled, p-laplacian,
radial gradients, the kink-circle field whose degeneracy set is the unit
circle, and the separable quartic/quartroot field degenerating only at the
origin), pointwise and batched evaluation, Jacobians with one-sided
differencing at declared kinks, and the sampled monotonicity/ellipticity
estimators used by the classification grid.

All estimators are upper estimates of the underlying infima; they are
deterministic for a fixed seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .geometry import Box, quintic_smoothstep, unit_directions

__all__ = [
    "FieldDescriptor",
    "FieldEvalError",
    "JacobianInfo",
    "MonotonicityReport",
    "make_builtin",
    "eval_field",
    "jacobian",
    "jacobian_batch",
    "monotony_modulus",
    "monotonicity_report",
    "strong_monotonicity_constant",
    "ellipticity_quotients",
    "default_radius_ladder",
    "default_lambda_ladder",
    "default_Lambda_ladder",
    "check_monotone_pairs",
]

BUILTIN_KINDS = (
    "identity-scaled",
    "p-laplacian",
    "radial-gradient",
    "kink-circle",
    "quartic-quartroot",
    "custom",
)

#: |G(xi+z) - G(xi)| below this contributes +inf to the s-quotient.
DENOM_GUARD = 1e-14


class FieldEvalError(RuntimeError):
    """Raised on non-finite output or out-of-box evaluation."""


@dataclass(frozen=True)
class FieldDescriptor:
    """A continuous strictly monotone field with metadata.

    eval_rule is vectorized over rows: (..., 2) -> (..., 2) and must be
    deterministic.  jacobian_rule, when present, returns (..., 2, 2) and
    agrees with central differences away from declared kink radii.
    growth_bound L satisfies |G(xi)| <= L(1 + |xi|) on the working box.
    """

    kind: str
    eval_rule: Callable[[np.ndarray], np.ndarray]
    working_box: Box
    growth_bound: float
    jacobian_rule: Callable[[np.ndarray], np.ndarray] | None = None
    kink_radii: tuple[float, ...] = ()
    is_gradient: bool = False
    energy_rule: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = dc_field(default_factory=dict)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return eval_field(self, pts)

    def raw(self, pts: np.ndarray) -> np.ndarray:
        """Evaluation without the box/finiteness guard (internal hot paths)."""
        return self.eval_rule(np.asarray(pts, dtype=float))


def eval_field(field: FieldDescriptor, pts: np.ndarray) -> np.ndarray:
    """Evaluate G with the contract guards.

    Points must lie in the working box inflated by its diameter; non-finite
    output signals a malformed custom rule.
    """
    pts = np.asarray(pts, dtype=float)
    pad = field.working_box.diameter
    if not np.all(field.working_box.contains(pts, pad=pad)):
        bad = pts[~field.working_box.contains(pts, pad=pad)]
        raise FieldEvalError(
            f"evaluation outside inflated working box, e.g. at {np.atleast_2d(bad)[0]}"
        )
    out = field.eval_rule(pts)
    if not np.all(np.isfinite(out)):
        raise FieldEvalError(f"{field.kind}: non-finite field value")
    return out


# ---------------------------------------------------------------------------
# builtin catalogue
# ---------------------------------------------------------------------------


def _radial_field(phi_prime, phi_pp=None, phi=None, kinks=(), kind="radial-gradient",
                  box=None, params=None) -> FieldDescriptor:
    """G = grad F with F = phi(|xi|); requires nondecreasing phi' >= 0, phi'(0) = 0."""
    box = box or Box.square(2.0)

    def rule(p):
        p = np.asarray(p, dtype=float)
        r = np.hypot(p[..., 0], p[..., 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(r > 0.0, phi_prime(np.maximum(r, 1e-300)) / np.maximum(r, 1e-300), 0.0)
        return scale[..., None] * p

    jac = None
    if phi_pp is not None:
        def jac(p):
            p = np.asarray(p, dtype=float)
            r = np.hypot(p[..., 0], p[..., 1])
            rr = np.maximum(r, 1e-300)
            er = p / rr[..., None]
            tang = phi_prime(rr) / rr
            rad = phi_pp(rr)
            eye = np.eye(2)
            outer = er[..., :, None] * er[..., None, :]
            out = tang[..., None, None] * (eye - outer) + rad[..., None, None] * outer
            return np.where((r > 0.0)[..., None, None], out, tang[..., None, None] * eye)

    # reject non-increasing profiles up front
    rs = np.linspace(1e-6, box.diameter, 2048)
    vals = phi_prime(rs)
    if np.any(np.diff(vals) < -1e-12) or np.any(vals < -1e-12):
        raise ValueError("radial profile phi' must be nonnegative and nondecreasing")

    energy = None
    if phi is not None:
        def energy(p):
            p = np.asarray(p, dtype=float)
            return phi(np.hypot(p[..., 0], p[..., 1]))

    L = float(np.max(vals / (1.0 + rs)) * 1.0001 + 1e-12)
    return FieldDescriptor(kind=kind, eval_rule=rule, jacobian_rule=jac,
                           working_box=box, growth_bound=L, kink_radii=tuple(kinks),
                           is_gradient=True, energy_rule=energy, params=params or {})


def _kink_phi_prime(r):
    r = np.asarray(r, dtype=float)
    inner = 1.0 - (1.0 - r) ** 3
    outer = 1.0 + np.cbrt(np.maximum(r - 1.0, 0.0))
    return np.where(r <= 1.0, inner, outer)


def _kink_phi_pp(r):
    r = np.asarray(r, dtype=float)
    inner = 3.0 * (1.0 - r) ** 2
    with np.errstate(divide="ignore"):
        outer = np.where(r > 1.0, (1.0 / 3.0) / np.maximum(r - 1.0, 1e-300) ** (2.0 / 3.0), np.inf)
    return np.where(r <= 1.0, inner, np.minimum(outer, 1e30))


def _kink_phi(r):
    r = np.asarray(r, dtype=float)
    inner = r + 0.25 * (1.0 - r) ** 4 - 0.25
    outer = 1.0 + (r - 1.0) + 0.75 * np.maximum(r - 1.0, 0.0) ** (4.0 / 3.0)
    return np.where(r <= 1.0, inner, outer)


def make_builtin(kind: str, box: Box | None = None, **params) -> FieldDescriptor:
    """Construct a builtin field; validates its invariants on a sample set.

    Kinds: identity-scaled (c*xi), p-laplacian (|xi|^(p-2) xi, p > 1),
    radial-gradient (phi' supplied), kink-circle, quartic-quartroot,
    custom (user eval rule).
    """
    box = box or Box.square(2.0)
    if kind == "identity-scaled":
        c = float(params.get("c", 1.0))
        if c <= 0:
            raise ValueError("identity-scaled needs c > 0")
        fd = FieldDescriptor(
            kind=kind,
            eval_rule=lambda p: c * np.asarray(p, dtype=float),
            jacobian_rule=lambda p: np.broadcast_to(
                c * np.eye(2), np.asarray(p).shape[:-1] + (2, 2)).copy(),
            working_box=box,
            growth_bound=c * (1.0 + box.diameter),
            is_gradient=True,
            energy_rule=lambda p: 0.5 * c * np.sum(np.asarray(p, float) ** 2, axis=-1),
            params={"c": c},
        )
    elif kind == "p-laplacian":
        p_exp = float(params.get("p", 4.0))
        if p_exp <= 1.0:
            raise ValueError("p-laplacian needs p > 1")

        def rule(pts):
            pts = np.asarray(pts, dtype=float)
            r = np.hypot(pts[..., 0], pts[..., 1])
            with np.errstate(divide="ignore"):
                scale = np.where(r > 0.0, np.maximum(r, 1e-300) ** (p_exp - 2.0), 0.0)
            return scale[..., None] * pts

        def jac(pts):
            # grad G = r^(p-2) I + (p-2) r^(p-4) xi (x) xi
            pts = np.asarray(pts, dtype=float)
            r = np.maximum(np.hypot(pts[..., 0], pts[..., 1]), 1e-300)
            outer = pts[..., :, None] * pts[..., None, :]
            out = (r ** (p_exp - 2.0))[..., None, None] * np.eye(2) \
                + ((p_exp - 2.0) * r ** (p_exp - 4.0))[..., None, None] * outer
            return np.minimum(out, 1e30)

        rmax = box.diameter
        fd = FieldDescriptor(
            kind=kind, eval_rule=rule, jacobian_rule=jac, working_box=box,
            growth_bound=max(1.0, rmax ** (p_exp - 1.0)),
            is_gradient=True,
            energy_rule=lambda q: np.hypot(np.asarray(q, float)[..., 0],
                                           np.asarray(q, float)[..., 1]) ** p_exp / p_exp,
            params={"p": p_exp},
        )
    elif kind == "radial-gradient":
        fd = _radial_field(params["phi_prime"], params.get("phi_pp"),
                           params.get("phi"), params.get("kinks", ()),
                           kind=kind, box=box, params=dict(params))
    elif kind == "kink-circle":
        fd = _radial_field(_kink_phi_prime, _kink_phi_pp, _kink_phi, kinks=(1.0,),
                           kind=kind, box=box)
    elif kind == "quartic-quartroot":
        def rule(pts):
            pts = np.asarray(pts, dtype=float)
            out = np.empty_like(pts)
            out[..., 0] = pts[..., 0] ** 3
            out[..., 1] = np.cbrt(pts[..., 1])
            return out

        def jac(pts):
            pts = np.asarray(pts, dtype=float)
            out = np.zeros(pts.shape[:-1] + (2, 2))
            out[..., 0, 0] = 3.0 * pts[..., 0] ** 2
            with np.errstate(divide="ignore"):
                out[..., 1, 1] = np.minimum(
                    (1.0 / 3.0) / np.maximum(np.abs(pts[..., 1]), 1e-300) ** (2.0 / 3.0), 1e30)
            return out

        fd = FieldDescriptor(
            kind=kind, eval_rule=rule, jacobian_rule=jac, working_box=box,
            growth_bound=max(1.0, box.diameter ** 2),
            is_gradient=True,
            energy_rule=lambda q: 0.25 * np.asarray(q, float)[..., 0] ** 4
            + 0.75 * np.abs(np.asarray(q, float)[..., 1]) ** (4.0 / 3.0),
            params={},
        )
    elif kind == "custom":
        rule = params["eval_rule"]
        probe = box.sample(np.random.default_rng(0), 256)
        gb = params.get("growth_bound")
        if gb is None:
            vals = np.linalg.norm(np.asarray(rule(probe), dtype=float), axis=-1)
            gb = float(np.max(vals / (1.0 + np.linalg.norm(probe, axis=-1))) * 1.1 + 1e-9)
        fd = FieldDescriptor(
            kind=kind, eval_rule=rule, jacobian_rule=params.get("jacobian_rule"),
            working_box=box, growth_bound=float(gb),
            kink_radii=tuple(params.get("kinks", ())),
            is_gradient=bool(params.get("is_gradient", False)),
            energy_rule=params.get("energy_rule"),
            params={},
        )
    else:
        raise ValueError(f"unknown builtin kind {kind!r}; expected one of {BUILTIN_KINDS}")

    violations = check_monotone_pairs(fd, n_pairs=2000, seed=0)
    if violations:
        raise ValueError(f"{kind}: strict monotonicity fails on sample pairs, e.g. {violations[0]}")
    return fd


def check_monotone_pairs(field: FieldDescriptor, n_pairs: int = 10_000, seed: int = 0,
                         box: Box | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Sampled strict-monotonicity check; returns violating pairs (empty = pass).

    Uses uniform random pairs plus radial scan pairs along lines through the
    origin, which catch radial-profile dips that random pairs miss.
    """
    box = box or field.working_box
    rng = np.random.default_rng(seed)
    xi = box.sample(rng, n_pairs)
    zeta = box.sample(rng, n_pairs)
    keep = np.linalg.norm(xi - zeta, axis=-1) > 1e-12
    xi, zeta = xi[keep], zeta[keep]

    # radial ladder pairs: (a*e, b*e) along a few directions
    half = 0.5 * min(box.hi_arr - box.lo_arr)
    rs = np.linspace(-half * 0.99, half * 0.99, 240)
    dirs = unit_directions(8)
    a = np.repeat(rs[:-1], len(dirs))
    b = np.repeat(rs[1:], len(dirs))
    e = np.tile(dirs, (len(rs) - 1, 1))
    center = 0.5 * (box.lo_arr + box.hi_arr)
    xi = np.vstack([xi, center + a[:, None] * e])
    zeta = np.vstack([zeta, center + b[:, None] * e])

    dg = field.raw(xi) - field.raw(zeta)
    dx = xi - zeta
    inner = np.sum(dg * dx, axis=-1)
    bad = np.flatnonzero(inner <= 0.0)
    return [(xi[i].copy(), zeta[i].copy()) for i in bad[:8]]


# ---------------------------------------------------------------------------
# Jacobians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobianInfo:
    matrix: np.ndarray          # (2, 2)
    sym: np.ndarray             # symmetric part
    eigenvalues: np.ndarray     # eigenvalues of the symmetric part, ascending
    near_kink: bool


def _sym_eigs(sym: np.ndarray) -> np.ndarray:
    tr = sym[..., 0, 0] + sym[..., 1, 1]
    det = sym[..., 0, 0] * sym[..., 1, 1] - sym[..., 0, 1] * sym[..., 1, 0]
    disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
    return np.stack([(tr - disc) / 2.0, (tr + disc) / 2.0], axis=-1)


def jacobian(field: FieldDescriptor, xi: np.ndarray, h: float = 1e-6,
             kink_ratio: float = 0.5) -> JacobianInfo:
    """Jacobian at a point: analytic when available, else central differences.

    Flags near-kink evaluation when the two one-sided difference quotients
    disagree by more than kink_ratio relative to their magnitude.
    """
    if h <= 0:
        raise ValueError("difference step must be positive")
    xi = np.asarray(xi, dtype=float).reshape(2)
    near = False
    if field.kink_radii:
        r = float(np.hypot(*xi))
        near = any(abs(r - rk) < 2.0 * h for rk in field.kink_radii)

    fwd = np.empty((2, 2))
    bwd = np.empty((2, 2))
    for j, e in enumerate(np.eye(2)):
        fwd[:, j] = (field.raw(xi + h * e) - field.raw(xi)) / h
        bwd[:, j] = (field.raw(xi) - field.raw(xi - h * e)) / h
    scale = np.abs(fwd) + np.abs(bwd) + 1e-300
    if np.any(np.abs(fwd - bwd) / scale > kink_ratio):
        near = True

    if field.jacobian_rule is not None and not near:
        mat = np.asarray(field.jacobian_rule(xi), dtype=float).reshape(2, 2)
    elif near:
        # one-sided on the outward side of the kink circle
        mat = fwd if (not field.kink_radii or np.hypot(*xi) >= min(field.kink_radii)) else bwd
    else:
        mat = 0.5 * (fwd + bwd)
    sym = 0.5 * (mat + mat.T)
    return JacobianInfo(matrix=mat, sym=sym, eigenvalues=_sym_eigs(sym), near_kink=near)


def jacobian_batch(field: FieldDescriptor, pts: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Batched Jacobians (N, 2, 2); analytic rule when present, else central FD.

    For fields with declared kink radii the difference switches to one-sided
    on the local side of the kink.
    """
    pts = np.asarray(pts, dtype=float)
    if field.jacobian_rule is not None and not field.kink_radii:
        return np.asarray(field.jacobian_rule(pts), dtype=float)
    n = pts.shape[0]
    out = np.empty((n, 2, 2))
    r = np.hypot(pts[:, 0], pts[:, 1])
    steps = np.maximum(h, 1e-3 * h * r)  # scale-aware step
    for j in range(2):
        e = np.zeros(2)
        e[j] = 1.0
        hp = steps[:, None] * e
        fwd = (field.raw(pts + hp) - field.raw(pts)) / steps[:, None]
        bwd = (field.raw(pts) - field.raw(pts - hp)) / steps[:, None]
        col = 0.5 * (fwd + bwd)
        if field.kink_radii:
            near = np.zeros(n, dtype=bool)
            for rk in field.kink_radii:
                near |= np.abs(r - rk) < 2.0 * steps
            col = np.where(near[:, None], np.where((r >= min(field.kink_radii))[:, None], fwd, bwd), col)
        out[:, :, j] = col
    if field.jacobian_rule is not None:
        ana = np.asarray(field.jacobian_rule(pts), dtype=float)
        near_any = np.zeros(n, dtype=bool)
        for rk in field.kink_radii:
            near_any |= np.abs(r - rk) < 1e-3
        out = np.where(near_any[:, None, None], out, ana)
    return out


# ---------------------------------------------------------------------------
# monotonicity estimators
# ---------------------------------------------------------------------------


def _pair_pool(field: FieldDescriptor, box: Box, n_samples: int, seed: int):
    """Shared t-independent pair ingredients for the monotony modulus."""
    rng = np.random.default_rng(seed)
    xi = box.sample(rng, n_samples)
    zeta = box.sample(rng, n_samples)
    n_graze = max(n_samples // 4, 256)
    bases = box.sample(rng, n_graze)
    dirs = unit_directions(64)[rng.integers(0, 64, size=n_graze)]
    # half the graze pairs at distance exactly t, half slightly above
    over = np.concatenate([np.zeros(n_graze // 2), rng.uniform(0.0, 0.25, n_graze - n_graze // 2)])
    half = 0.5 * float(min(box.hi_arr - box.lo_arr))
    scan_r = np.linspace(-half, half, 800)
    scan_dirs = unit_directions(8)
    # line scans through the center and through edge-midpoint anchors; the
    # latter catch minima hugging the box boundary (anisotropic fields)
    center = 0.5 * (box.lo_arr + box.hi_arr)
    offs = 0.9 * half
    anchors = center + np.array([[0.0, 0.0], [offs, 0.0], [-offs, 0.0],
                                 [0.0, offs], [0.0, -offs]])
    return xi, zeta, bases, dirs, over, scan_r, scan_dirs, anchors


def monotony_modulus(field: FieldDescriptor, t: float, box: Box | None = None,
                     n_samples: int = 4096, seed: int = 0) -> float:
    """Sampled modulus of monotony: min <G(xi)-G(zeta), xi-zeta> over pairs
    at distance >= t.  Upper estimate of the infimum; nondecreasing in t for
    a fixed seed.  A non-positive value flags a monotonicity violation.
    """
    if t <= 0:
        raise ValueError("gap t must be positive")
    if n_samples < 1000:
        raise ValueError("need at least 10^3 sample pairs")
    box = box or field.working_box
    xi_u, zeta_u, bases, dirs, over, scan_r, scan_dirs, anchors = _pair_pool(
        field, box, n_samples, seed)

    vals = []
    d = np.linalg.norm(xi_u - zeta_u, axis=-1)
    keep = d >= t
    if np.any(keep):
        dg = field.raw(xi_u[keep]) - field.raw(zeta_u[keep])
        vals.append(np.sum(dg * (xi_u[keep] - zeta_u[keep]), axis=-1))

    # graze pairs at distance t*(1+u); the u = 0 half sits on the boundary,
    # where the infimum is approached.  Pairs leaving the box are dropped,
    # keeping this an estimate of the in-box infimum (and keeping the
    # estimate nondecreasing in t: the admissible set only shrinks).
    sep = t * (1.0 + over)
    second = bases + sep[:, None] * dirs
    ok = box.contains(second)
    if np.any(ok):
        dg = field.raw(second[ok]) - field.raw(bases[ok])
        vals.append(np.sum(dg * (sep[ok, None] * dirs[ok]), axis=-1))

    # line scans at separation exactly t
    for anchor in anchors:
        for e in scan_dirs:
            a = anchor + scan_r[:, None] * e
            b = anchor + (scan_r + t)[:, None] * e
            ok = box.contains(a) & box.contains(b)
            if not np.any(ok):
                continue
            dg = field.raw(b[ok]) - field.raw(a[ok])
            vals.append(np.sum(dg * (t * e), axis=-1))

    return float(np.min(np.concatenate(vals)))


@dataclass(frozen=True)
class MonotonicityReport:
    omega_samples: list[tuple[float, float]]
    strong_constant: float | None
    lipschitz_estimate: float


def monotonicity_report(field: FieldDescriptor, t_list, box: Box | None = None,
                        n_samples: int = 4096, seed: int = 0) -> MonotonicityReport:
    box = box or field.working_box
    omega = [(float(t), monotony_modulus(field, float(t), box, n_samples, seed)) for t in t_list]
    rng = np.random.default_rng(seed + 1)
    xi = box.sample(rng, n_samples)
    zeta = box.sample(rng, n_samples)
    d = np.linalg.norm(xi - zeta, axis=-1)
    keep = d > 1e-9
    dg = np.linalg.norm(field.raw(xi[keep]) - field.raw(zeta[keep]), axis=-1)
    lip = float(np.max(dg / d[keep]))
    return MonotonicityReport(
        omega_samples=omega,
        strong_constant=strong_monotonicity_constant(field, box, n_samples, seed=seed),
        lipschitz_estimate=lip,
    )


def strong_monotonicity_constant(field: FieldDescriptor, box: Box | None = None,
                                 n_samples: int = 10_000, cap: float = 1e6,
                                 seed: int = 0) -> float | None:
    """Smallest C with C <G(xi)-G(zeta), xi-zeta> >= |xi-zeta|^2 + |G(xi)-G(zeta)|^2
    over sampled pairs, or None when the quotient exceeds cap (degenerate field).

    The pair pool mixes uniform pairs with short near-diagonal pairs (geometric
    separation ladder down to 1e-6) anchored both at random bases and along
    rays through the origin, where power-law fields degenerate.
    """
    box = box or field.working_box
    rng = np.random.default_rng(seed)
    xi = [box.sample(rng, n_samples)]
    zeta = [box.sample(rng, n_samples)]

    seps = 1e-6 * 2.0 ** np.arange(0, 20)
    bases = box.sample(rng, n_samples // 4)
    dirs = unit_directions(16)[rng.integers(0, 16, size=len(bases))]
    for s in seps:
        xi.append(bases)
        zeta.append(bases + s * dirs)
    # origin-anchored radial pairs (s*v, 2s*v)
    if np.all(box.contains(np.zeros(2))):
        vdirs = unit_directions(16)
        for s in seps:
            xi.append(s * vdirs)
            zeta.append(2.0 * s * vdirs)

    xi = np.vstack(xi)
    zeta = np.vstack(zeta)
    dx = xi - zeta
    nd = np.linalg.norm(dx, axis=-1)
    keep = nd > 1e-12
    xi, zeta, dx = xi[keep], zeta[keep], dx[keep]
    dg = field.raw(xi) - field.raw(zeta)
    inner = np.sum(dg * dx, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (np.sum(dx * dx, axis=-1) + np.sum(dg * dg, axis=-1)) / inner
    ratio = np.where(inner > 0.0, ratio, np.inf)
    worst = float(np.max(ratio))
    return None if worst > cap else worst


# ---------------------------------------------------------------------------
# ellipticity quotients and ladders
# ---------------------------------------------------------------------------


def default_radius_ladder(n: int = 8, smallest: float = 1e-3, ratio: float = 2.0) -> np.ndarray:
    """Decreasing probe radii, geometric: smallest * ratio^(n-1) ... smallest."""
    return smallest * ratio ** np.arange(n - 1, -1, -1)


def default_lambda_ladder(depth: int = 10) -> np.ndarray:
    """Decreasing lower-ellipticity thresholds 1, 1/2, ..., 2^-depth."""
    return 2.0 ** (-np.arange(depth + 1, dtype=float))


def default_Lambda_ladder(depth: int = 10) -> np.ndarray:
    """Increasing upper-ellipticity thresholds 1, 2, ..., 2^depth."""
    return 2.0 ** np.arange(depth + 1, dtype=float)


def quotient_samples(field: FieldDescriptor, pts: np.ndarray, radii: np.ndarray,
                     n_directions: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Min over probes of the two ellipticity quotients at each point.

    d-quotient: <G(xi+z) - G(xi), z> / |z|^2, the ellipticity from below.
    s-quotient: <G(xi+z) - G(xi), z> / |G(xi+z) - G(xi)|^2, from above.
    Probes are |z| in radii times n_directions unit directions.  Samples with
    |G(xi+z) - G(xi)| under the guard contribute +inf to the s-quotient.
    """
    pts = np.asarray(pts, dtype=float)
    base = field.raw(pts)
    d_min = np.full(pts.shape[0], np.inf)
    s_min = np.full(pts.shape[0], np.inf)
    for e in unit_directions(n_directions):
        for rho in np.asarray(radii, dtype=float):
            z = rho * e
            dg = field.raw(pts + z) - base
            inner = dg[:, 0] * z[0] + dg[:, 1] * z[1]
            d_min = np.minimum(d_min, inner / (rho * rho))
            denom = dg[:, 0] ** 2 + dg[:, 1] ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                s_val = np.where(np.sqrt(denom) < DENOM_GUARD, np.inf, inner / denom)
            s_min = np.minimum(s_min, s_val)
    return d_min, s_min


def ellipticity_quotients(field: FieldDescriptor, xi: np.ndarray,
                          radii: np.ndarray | None = None,
                          n_directions: int = 64) -> tuple[float, float]:
    """Pointwise (d_quot, s_quot); upper estimates of the liminf quantities."""
    if n_directions < 32:
        raise ValueError("need at least 32 directions")
    radii = default_radius_ladder() if radii is None else np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radius ladder must be strictly decreasing")
    if radii[-1] < 1e-12:
        raise ValueError("smallest probe radius below machine-safe floor")
    d, s = quotient_samples(field, np.asarray(xi, dtype=float).reshape(1, 2), radii, n_directions)
    return float(d[0]), float(s[0])

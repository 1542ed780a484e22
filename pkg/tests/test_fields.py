"""Field catalogue, Jacobians and monotonicity estimators."""
import numpy as np
import pytest

from monopde import Box, make_builtin, eval_field, jacobian
from monopde.fields import (FieldEvalError, check_monotone_pairs,
                            ellipticity_quotients, monotonicity_report,
                            monotony_modulus, strong_monotonicity_constant,
                            default_radius_ladder)

BOX = Box.square(2.0)


@pytest.fixture(scope="module")
def identity():
    return make_builtin("identity-scaled", c=1.0, box=BOX)


@pytest.fixture(scope="module")
def scaled2():
    return make_builtin("identity-scaled", c=2.0, box=BOX)


@pytest.fixture(scope="module")
def plap4():
    return make_builtin("p-laplacian", p=4.0, box=BOX)


@pytest.fixture(scope="module")
def kink():
    return make_builtin("kink-circle", box=BOX)


@pytest.fixture(scope="module")
def quartic():
    return make_builtin("quartic-quartroot", box=BOX)


# -- construction and evaluation --------------------------------------------

def test_identity_eval(identity):
    assert np.allclose(eval_field(identity, np.array([1.0, 2.0])), [1.0, 2.0])
    assert np.allclose(eval_field(identity, np.array([3.0, -4.0])), [3.0, -4.0])


def test_plap_eval(plap4):
    assert np.allclose(eval_field(plap4, np.array([1.0, 0.0])), [1.0, 0.0])
    assert np.allclose(eval_field(plap4, np.array([2.0, 0.0])), [8.0, 0.0])
    assert np.allclose(eval_field(plap4, np.array([0.0, 0.0])), [0.0, 0.0])


def test_kink_eval(kink):
    # phi'(0.5) = 1 - (1 - 0.5)^3 = 0.875, evaluated by hand
    assert np.allclose(eval_field(kink, np.array([0.5, 0.0])), [0.875, 0.0])


def test_quartic_eval():
    # 2^3 = 8 and 8^(1/3) = 2; box sized so (2, 8) is a legal query
    q = make_builtin("quartic-quartroot", box=Box.square(4.0))
    assert np.allclose(eval_field(q, np.array([2.0, 8.0])), [8.0, 2.0], atol=1e-14)


def test_eval_rejects_far_points(identity):
    with pytest.raises(FieldEvalError):
        eval_field(identity, np.array([100.0, 0.0]))


def test_eval_rejects_nonfinite_custom():
    fd = make_builtin("custom", box=BOX,
                      eval_rule=lambda p: np.asarray(p, float) * 1.0 + 0.01)
    bad = make_builtin("custom", box=BOX, eval_rule=lambda p: np.asarray(p, float) + 0.01)
    object.__setattr__(bad, "eval_rule", lambda p: np.full_like(np.asarray(p, float), np.nan))
    with pytest.raises(FieldEvalError):
        eval_field(bad, np.zeros(2))
    assert np.all(np.isfinite(eval_field(fd, np.ones(2))))


def test_make_builtin_rejects_bad_params():
    with pytest.raises(ValueError):
        make_builtin("p-laplacian", p=1.0)
    with pytest.raises(ValueError):
        make_builtin("identity-scaled", c=-1.0)
    with pytest.raises(ValueError):
        make_builtin("radial-gradient", phi_prime=lambda r: -np.asarray(r))
    with pytest.raises(ValueError):
        make_builtin("no-such-kind")


def test_determinism(kink):
    p = np.array([[0.3, 0.7], [1.5, -0.2]])
    a = eval_field(kink, p)
    b = eval_field(kink, p)
    assert np.array_equal(a, b)


def test_strict_monotonicity_all_builtins(identity, scaled2, plap4, kink, quartic):
    for fd in (identity, scaled2, plap4, kink, quartic):
        assert check_monotone_pairs(fd, n_pairs=10_000, seed=3) == []


# -- Jacobians ----------------------------------------------------------------

def test_jacobian_identity(identity):
    info = jacobian(identity, np.array([0.4, -1.1]), h=1e-6)
    assert np.allclose(info.matrix, np.eye(2), atol=1e-9)
    assert np.allclose(info.eigenvalues, [1.0, 1.0], atol=1e-9)
    assert not info.near_kink


def test_jacobian_plap4(plap4):
    # grad G = |xi|^2 I + 2 xi (x) xi has eigenvalues (3, 1) at (1, 0)
    info = jacobian(plap4, np.array([1.0, 0.0]))
    assert np.allclose(sorted(info.eigenvalues), [1.0, 3.0], atol=1e-8)


def test_jacobian_quartic(quartic):
    info = jacobian(quartic, np.array([1.0, 1.0]))
    assert np.allclose(info.matrix, np.diag([3.0, 1.0 / 3.0]), atol=1e-8)


def test_jacobian_flags_kink(kink):
    info = jacobian(kink, np.array([1.0, 0.0]), h=1e-6)
    assert info.near_kink


def test_jacobian_matches_fd_on_smooth_regions(plap4, quartic):
    # analytic rule agrees with central differences to order h^2
    rng = np.random.default_rng(5)
    for fd in (plap4, quartic):
        for _ in range(5):
            xi = rng.uniform(0.5, 1.5, size=2)
            ana = fd.jacobian_rule(xi)
            errs = []
            for h in (1e-3, 5e-4):
                num = np.empty((2, 2))
                for j, e in enumerate(np.eye(2)):
                    num[:, j] = (fd.raw(xi + h * e) - fd.raw(xi - h * e)) / (2 * h)
                errs.append(np.max(np.abs(num - ana)))
            assert errs[0] < 1e-4
            # halving h shrinks the error about 4x
            assert errs[1] < errs[0] * 0.4 + 1e-12


def test_jacobian_requires_positive_step(identity):
    with pytest.raises(ValueError):
        jacobian(identity, np.zeros(2), h=0.0)


# -- monotony modulus ---------------------------------------------------------

def test_monotony_identity(identity, scaled2):
    # identity: inf over |xi-zeta| > t of |xi-zeta|^2 = t^2, attained in the
    # limit; graze pairs at distance exactly t give the boundary value
    for t in (0.5, 1.0):
        w = monotony_modulus(identity, t, BOX, n_samples=4096, seed=0)
        assert 0.95 * t * t <= w <= t * t * 1.0000001
    w2 = monotony_modulus(scaled2, 1.0, BOX, n_samples=4096, seed=0)
    assert 0.95 * 2.0 <= w2 <= 2.0000001


def test_monotony_nondecreasing_in_t(kink, quartic):
    ts = [0.1, 0.25, 0.5, 1.0, 1.5]
    for fd in (kink, quartic):
        vals = [monotony_modulus(fd, t, BOX, n_samples=4096, seed=1) for t in ts]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(v > 0 for v in vals)


def test_monotony_quartic_brute_force_oracle(quartic):
    # independent oracle: dense pair lattice, min over pairs at distance > 1
    n = 200
    g = np.linspace(-2.0, 2.0, n)
    gx, gy = np.meshgrid(g, g, indexing="ij")
    pts1d = np.linspace(-2.0, 2.0, n)
    # separable structure: brute-force over same-axis pairs plus a coarse 2D scan
    best = np.inf
    for arr, comp in ((pts1d, lambda v: v ** 3), (pts1d, np.cbrt)):
        a, b = np.meshgrid(arr, arr, indexing="ij")
        d = np.abs(a - b)
        val = (comp(a) - comp(b)) * (a - b)
        best = min(best, np.min(np.where(d > 1.0, val, np.inf)))
    coarse = np.linspace(-2.0, 2.0, 60)
    P = np.stack(np.meshgrid(coarse, coarse, indexing="ij"), axis=-1).reshape(-1, 2)
    G = np.column_stack([P[:, 0] ** 3, np.cbrt(P[:, 1])])
    diff = P[:, None, :] - P[None, :, :]
    dist2 = np.sum(diff * diff, axis=-1)
    inner = np.sum((G[:, None, :] - G[None, :, :]) * diff, axis=-1)
    best = min(best, float(np.min(np.where(dist2 > 1.0, inner, np.inf))))
    w = monotony_modulus(quartic, 1.0, BOX, n_samples=16384, seed=2)
    # both are upper estimates of the same infimum
    assert abs(w - best) <= 0.25 * best


def test_monotony_validates_inputs(identity):
    with pytest.raises(ValueError):
        monotony_modulus(identity, -1.0, BOX)
    with pytest.raises(ValueError):
        monotony_modulus(identity, 0.5, BOX, n_samples=10)


def test_monotonicity_report(identity):
    rep = monotonicity_report(identity, [0.25, 0.5, 1.0], BOX, n_samples=2048)
    ts, ws = zip(*rep.omega_samples)
    assert list(ts) == [0.25, 0.5, 1.0]
    assert all(b >= a for a, b in zip(ws, ws[1:]))
    assert rep.strong_constant == pytest.approx(2.0, rel=1e-12)
    assert rep.lipschitz_estimate == pytest.approx(1.0, rel=1e-9)


# -- strong monotonicity constant --------------------------------------------

def test_strong_constant_identity(identity, scaled2):
    # (|dx|^2 + |dG|^2) / <dG, dx> is identically 2 for the identity
    assert strong_monotonicity_constant(identity, BOX) == pytest.approx(2.0, rel=1e-12)
    # and (1 + c^2)/c = 5/2 for c = 2
    assert strong_monotonicity_constant(scaled2, BOX) == pytest.approx(2.5, rel=1e-12)


def test_strong_constant_absent_for_plap(plap4):
    # quotient ~ |xi|^{-2} along rays into the origin: unbounded
    assert strong_monotonicity_constant(plap4, BOX) is None


# -- ellipticity quotients ----------------------------------------------------

def test_quotients_identity(identity):
    d, s = ellipticity_quotients(identity, np.array([0.3, 0.7]))
    assert d == pytest.approx(1.0, abs=1e-12)
    assert s == pytest.approx(1.0, abs=1e-12)


def test_quotients_quartic_origin(quartic):
    # along e1 the d-quotient sample at radius r is r^2; along e2 the
    # s-quotient sample is r^(2/3) (both analytic)
    d, s = ellipticity_quotients(quartic, np.zeros(2))
    assert d <= 1e-6 + 1e-12
    assert s <= 1e-2 + 1e-12


def test_quotients_kink_circle(kink):
    # radially inward probes from (1, 0) see the cubic flat side
    d, s = ellipticity_quotients(kink, np.array([1.0, 0.0]))
    radii = default_radius_ladder()
    assert d <= radii[-1] ** 2 * (1.0 + 1e-6)
    d_inner, _ = ellipticity_quotients(kink, np.array([0.5, 0.0]))
    assert d_inner > 0.4  # interior of the disk is elliptic from below


def test_quotients_validate_inputs(identity):
    with pytest.raises(ValueError):
        ellipticity_quotients(identity, np.zeros(2), n_directions=8)
    with pytest.raises(ValueError):
        ellipticity_quotients(identity, np.zeros(2), radii=np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        ellipticity_quotients(identity, np.zeros(2), radii=np.array([1e-1, 1e-15]))

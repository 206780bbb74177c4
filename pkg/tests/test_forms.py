import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symplab.ambient import AmbientModel, TrigTerm, standard_form
from symplab.embedding import flat_torus, graph_torus, sheared_torus, split_tangent
from symplab.forms import (cr_residual, cr_variation_residual, d_omega_D_fd, jtilde, omega_D,
                           omega_S)
from symplab.surface import AreaForm, TorusGrid

TWO_PI = 2 * np.pi
STD = AmbientModel.standard(2)
seeds = st.integers(0, 2 ** 32 - 1)


def perturbed(eps=1.0):
    return AmbientModel.standard(2, [TrigTerm((1, 0, 0, 0), eps / TWO_PI, "sin", 3)])


@pytest.fixture
def grid():
    return TorusGrid.square(32)


def e(grid, i, scale=1.0):
    v = np.zeros(grid.shape + (4,))
    v[..., i] = scale
    return v


def random_field(grid, rng):
    x, y = grid.coords()
    out = np.zeros(grid.shape + (4,))
    for c in range(4):
        for _ in range(3):
            k = rng.integers(-2, 3, size=2)
            out[..., c] += rng.normal() * np.cos(TWO_PI * (k[0] * x + k[1] * y) + TWO_PI * rng.random())
    return 0.3 * out


def wavy(grid, model):
    x, y = grid.coords()
    normal = np.stack([0.05 * np.sin(TWO_PI * (x + y)), 0.05 * np.cos(TWO_PI * (x - y))], -1)
    return graph_torus(model, grid, normal)


def test_omega_D_examples(grid):
    x, _ = grid.coords()
    f0, one = flat_torus(STD, grid), AreaForm.constant(grid)
    assert omega_D(f0, e(grid, 2), e(grid, 3), one).value == 1.0
    r = omega_D(f0, e(grid, 3, -np.cos(TWO_PI * x)), e(grid, 2, np.cos(TWO_PI * x)), one)
    assert abs(r.value - 0.5) < 1e-15
    assert np.allclose(r.integrand.g, np.cos(TWO_PI * x) ** 2)


def test_omega_S_examples(grid):
    x, _ = grid.coords()
    f0 = flat_torus(STD, grid)
    assert omega_S(f0, e(grid, 3, -1.0), e(grid, 2)).value == 2.0
    r = omega_S(f0, e(grid, 3, -np.cos(TWO_PI * x)), e(grid, 2, np.cos(TWO_PI * x)))
    assert abs(r.value - 1.0) < 1e-15


def test_omega_S_tangential_vanishes(grid):
    x, y = grid.coords()
    f0 = flat_torus(STD, grid)
    for v in (e(grid, 3, -1.0), e(grid, 1, -0.7), e(grid, 1, -np.cos(TWO_PI * x)),
              e(grid, 2, np.sin(TWO_PI * y))):
        assert np.max(np.abs(omega_S(f0, e(grid, 0), v).integrand.g)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_pairings_antisymmetric_and_bilinear(seed):
    grid = TorusGrid.square(16)
    rng = np.random.default_rng(seed)
    f = wavy(grid, perturbed(0.3))
    sigma = f.area_form()
    u, v, w = (random_field(grid, rng) for _ in range(3))
    a, b = rng.normal(size=2)
    for pair in (lambda p, q: omega_D(f, p, q, sigma).value, lambda p, q: omega_S(f, p, q).value):
        assert abs(pair(v, v)) <= 1e-15
        assert abs(pair(u, v) + pair(v, u)) <= 1e-14
        lhs = pair(a * u + b * w, v)
        assert abs(lhs - a * pair(u, v) - b * pair(w, v)) <= 1e-12 * (1 + abs(lhs))


def wedge_square(om, vecs):
    # (om ^ om)(v1..v4) from the shuffle-sum definition with 1/(2!2!) normalisation
    total = 0.0
    for perm in itertools.permutations(range(4)):
        sgn = np.linalg.det(np.eye(4)[list(perm)])
        p = [vecs[i] for i in perm]
        total += sgn * (p[0] @ om @ p[1]) * (p[2] @ om @ p[3])
    return total / 4


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_omega_S_integrand_is_wedge_square(seed):
    grid = TorusGrid.square(8)
    rng = np.random.default_rng(seed)
    f = wavy(grid, perturbed(0.5))
    v1, v2 = random_field(grid, rng), random_field(grid, rng)
    g = omega_S(f, v1, v2).integrand.g
    om = f.omega
    for _ in range(5):
        i, j = rng.integers(0, 8, size=2)
        ref = wedge_square(om[i, j], [v1[i, j], v2[i, j], f.fx[i, j], f.fy[i, j]])
        assert abs(g[i, j] - ref) <= 1e-12 * (1 + abs(ref))


def test_jtilde_example(grid):
    f0 = flat_torus(STD, grid)
    assert np.allclose(jtilde(f0, e(grid, 2)), e(grid, 3))
    assert np.allclose(jtilde(f0, e(grid, 0)), e(grid, 1))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_jtilde_properties(seed):
    grid = TorusGrid.square(16)
    rng = np.random.default_rng(seed)
    f = wavy(grid, perturbed(0.8))
    sigma = f.area_form()
    v = random_field(grid, rng)
    assert np.max(np.abs(jtilde(f, jtilde(f, v)) + v)) <= 1e-12
    assert omega_D(f, v, jtilde(f, v), sigma).value > 0
    w = random_field(grid, rng)
    a = omega_D(f, jtilde(f, v), jtilde(f, w), sigma).value
    assert abs(a - omega_D(f, v, w, sigma).value) <= 1e-12


def test_d_omega_D_constant_model(grid):
    rng = np.random.default_rng(0)
    f = wavy(grid, STD)
    V = [random_field(grid, rng) for _ in range(3)]
    for h in (1e-1, 1e-3, 1e-6):
        assert d_omega_D_fd(f, *V, h, f.area_form()) <= 1e-12


def test_d_omega_D_degenerate_pair(grid):
    rng = np.random.default_rng(1)
    f = wavy(grid, perturbed())
    V1, V3 = random_field(grid, rng), random_field(grid, rng)
    assert d_omega_D_fd(f, V1, V1, V3, 1e-2, f.area_form()) <= 1e-12


def test_d_omega_D_second_order():
    grid = TorusGrid.square(32)
    rng = np.random.default_rng(2)
    f = wavy(grid, perturbed())
    sigma = f.area_form()
    V = [random_field(grid, rng) for _ in range(3)]
    res = [d_omega_D_fd(f, *V, 1e-2 / 2 ** k, sigma) for k in range(4)]
    ratios = [res[k] / res[k + 1] for k in range(3)]
    assert all(3.5 <= r <= 4.5 for r in ratios), ratios


def test_d_omega_D_rejects_step(grid):
    f = flat_torus(STD, grid)
    z = np.zeros(grid.shape + (4,))
    with pytest.raises(ValueError):
        d_omega_D_fd(f, z, z, z, 1.0, AreaForm.constant(grid))


def test_cr_residual_examples(grid):
    assert np.max(cr_residual(flat_torus(STD, grid))) <= 1e-12
    assert np.max(cr_residual(sheared_torus(STD, grid, 0.3))) > 0.1


def test_cr_variation_constant(grid):
    f0 = flat_torus(STD, grid)
    v = np.broadcast_to([0.3, -1.0, 2.0, 0.5], grid.shape + (4,))
    J0 = -standard_form(2)
    assert np.max(cr_variation_residual(f0, v, J0)) == 0.0
    assert np.max(cr_variation_residual(f0, v, STD)) == 0.0
    with pytest.raises(ValueError):
        cr_variation_residual(f0, v, perturbed())


def test_split_parts_tame(grid):
    f = wavy(grid, perturbed(0.5))
    sigma = f.area_form()
    v = random_field(grid, np.random.default_rng(5))
    xi = split_tangent(f, v).orthogonal
    assert omega_D(f, xi, jtilde(f, xi), sigma).value > 0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symplab.errors import FoldingError, NonZeroMeanError, NotClosedError
from symplab.surface import (AreaForm, GridDiffeo, Interpolant, OneForm, SurfaceField, TorusGrid,
                             TwoForm, exterior_derivative, flow_diffeo, hodge_split, integrate,
                             integrate_scalar, laplacian, lie_derivative_residual, load_field,
                             partial, poisson_bracket, poisson_solve, save_field,
                             surface_hamiltonian_field)

TWO_PI = 2 * np.pi
seeds = st.integers(0, 2 ** 32 - 1)


def band_limited(grid, rng, B=3, amp=0.1):
    x, y = grid.coords()
    out = np.zeros(grid.shape)
    for kx in range(-B, B + 1):
        for ky in range(-B, B + 1):
            if kx or ky:
                ph = TWO_PI * (kx * x + ky * y)
                out += rng.normal() * np.cos(ph) + rng.normal() * np.sin(ph)
    return amp * out / np.abs(out).max()


@pytest.fixture
def grid():
    return TorusGrid.square(32)


def test_grid_invariants():
    with pytest.raises(ValueError):
        TorusGrid(4, 32)
    g = TorusGrid(16, 32)
    x, y = g.coords()
    assert x.shape == (16, 32) and x[1, 0] == 1 / 16 and y[0, 1] == 1 / 32


def test_area_form_positive(grid):
    with pytest.raises(ValueError):
        AreaForm(np.zeros(grid.shape))
    assert AreaForm.constant(grid, 2.0).total == 2.0


def test_d_of_sine(grid):
    x, _ = grid.coords()
    d = exterior_derivative(np.sin(TWO_PI * x) / TWO_PI)
    assert np.max(np.abs(d.a - np.cos(TWO_PI * x))) < 1e-13
    assert np.max(np.abs(d.b)) < 1e-13


def test_d_of_constant_form(grid):
    c = np.full(grid.shape, 0.7)
    assert np.max(np.abs(exterior_derivative(OneForm(c, np.zeros_like(c))).g)) < 1e-14


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_d_squared_zero(seed):
    g = TorusGrid.square(32)
    h = band_limited(g, np.random.default_rng(seed))
    assert np.max(np.abs(exterior_derivative(exterior_derivative(h)).g)) <= 1e-12


def test_integrals(grid):
    x, _ = grid.coords()
    assert integrate(TwoForm(np.ones(grid.shape))) == 1.0
    assert abs(integrate(TwoForm(np.cos(TWO_PI * x) ** 2)) - 0.5) < 1e-15
    assert integrate_scalar(np.ones(grid.shape), AreaForm.constant(grid)) == 1.0


def test_hodge_exact(grid):
    x, _ = grid.coords()
    hs = hodge_split(OneForm(np.cos(TWO_PI * x), np.zeros(grid.shape)))
    assert max(map(abs, hs.periods)) < 1e-15
    assert np.max(np.abs(hs.potential - np.sin(TWO_PI * x) / TWO_PI)) < 1e-14
    assert hs.is_exact(1e-12)


def test_hodge_harmonic(grid):
    hs = hodge_split(OneForm(np.full(grid.shape, 0.7), np.zeros(grid.shape)))
    assert hs.periods == pytest.approx((0.7, 0.0), abs=1e-15)
    assert np.max(np.abs(hs.potential)) < 1e-15
    assert not hs.is_exact(1e-8)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_hodge_round_trip(seed):
    g = TorusGrid.square(32)
    h = band_limited(g, np.random.default_rng(seed))
    hs = hodge_split(exterior_derivative(h))
    assert max(map(abs, hs.periods)) <= 1e-12
    assert np.max(np.abs(hs.potential - (h - h.mean()))) < 1e-12


def test_hodge_rejects_non_closed(grid):
    x, _ = grid.coords()
    with pytest.raises(NotClosedError) as info:
        hodge_split(OneForm(np.zeros(grid.shape), np.sin(TWO_PI * x)))
    assert info.value.residual > 1


def test_poisson_examples(grid):
    x, _ = grid.coords()
    u = poisson_solve(np.sin(TWO_PI * x))
    assert np.max(np.abs(u + np.sin(TWO_PI * x) / TWO_PI ** 2)) < 1e-15
    assert np.array_equal(poisson_solve(np.zeros(grid.shape)), np.zeros(grid.shape))
    with pytest.raises(NonZeroMeanError):
        poisson_solve(np.ones(grid.shape))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_poisson_round_trip(seed):
    g = TorusGrid.square(32)
    f = band_limited(g, np.random.default_rng(seed), B=5, amp=1.0)
    assert np.max(np.abs(laplacian(poisson_solve(f)) - f)) < 1e-12


def test_hamiltonian_field_example(grid):
    x, _ = grid.coords()
    X = surface_hamiltonian_field(np.cos(TWO_PI * x) / TWO_PI, AreaForm.constant(grid))
    assert np.max(np.abs(X.x1)) < 1e-15
    assert np.max(np.abs(X.x2 + np.sin(TWO_PI * x))) < 1e-14
    Z = surface_hamiltonian_field(np.full(grid.shape, 3.0), AreaForm.constant(grid))
    assert np.max(np.abs(Z.stacked())) < 1e-15


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_hamiltonian_field_preserves_area(seed):
    g = TorusGrid.square(32)
    rng = np.random.default_rng(seed)
    rho = 1.0 + 0.5 * band_limited(g, rng, B=2, amp=1.0)
    X = surface_hamiltonian_field(band_limited(g, rng), AreaForm(rho))
    assert lie_derivative_residual(X, AreaForm(rho)) <= 1e-10


def test_poisson_bracket(grid):
    x, y = grid.coords()
    one = AreaForm.constant(grid)
    p1, p2 = np.cos(TWO_PI * x) / TWO_PI, np.cos(TWO_PI * y) / TWO_PI
    assert np.max(np.abs(poisson_bracket(p1, p1, one))) < 1e-15
    # with our sign convention the bracket is -sin(2 pi x) sin(2 pi y)
    b = poisson_bracket(p1, p2, one)
    assert np.max(np.abs(b + np.sin(TWO_PI * x) * np.sin(TWO_PI * y))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_bracket_integrates_to_zero(seed):
    g = TorusGrid.square(32)
    rng = np.random.default_rng(seed)
    one = AreaForm.constant(g)
    b = poisson_bracket(band_limited(g, rng), band_limited(g, rng), one)
    assert abs(integrate_scalar(b, one)) <= 1e-10


@pytest.mark.parametrize("mode", ["spline", "fourier"])
def test_interpolant_recovers_grid(grid, mode):
    h = band_limited(grid, np.random.default_rng(3))
    assert np.max(np.abs(Interpolant(h, mode)(grid.points()) - h)) < 1e-12


def test_fourier_interpolant_exact_off_grid(grid):
    rng = np.random.default_rng(1)
    p = rng.random((200, 2))
    x, y = grid.coords()
    f = lambda x, y: np.sin(TWO_PI * x) * np.cos(2 * TWO_PI * y)
    vals = Interpolant(f(x, y), "fourier")(p)
    assert np.max(np.abs(vals - f(p[:, 0], p[:, 1]))) < 1e-13


def test_flow_zero_and_constant(grid):
    z = flow_diffeo(SurfaceField.zeros(grid), 1.0, 5)
    assert np.array_equal(z.displacement, np.zeros(grid.shape + (2,)))
    c = SurfaceField(np.full(grid.shape, 0.3), np.zeros(grid.shape))
    phi = flow_diffeo(c, 1.0, 7)
    assert np.allclose(phi.displacement[..., 0], 0.3, atol=1e-14)
    assert np.allclose(phi.displacement[..., 1], 0.0, atol=1e-14)


def test_flow_preserves_area_converges():
    errs = []
    for n in (32, 64):
        g = TorusGrid.square(n)
        x, y = g.coords()
        rho = AreaForm(1 + 0.3 * np.cos(TWO_PI * x) * np.sin(TWO_PI * y))
        psi = 0.003 * (np.cos(TWO_PI * (x + 2 * y)) + np.sin(TWO_PI * (2 * x - y)))
        phi = flow_diffeo(surface_hamiltonian_field(psi, rho), 1.0, 20)
        errs.append(np.max(np.abs(phi.pullback_area(rho).density - rho.density)))
    assert errs[1] < 1e-4
    assert errs[0] / errs[1] > 4  # at least second order in N


def test_time_dependent_flow_matches_constant():
    g = TorusGrid.square(16)
    X = SurfaceField(np.full(g.shape, 0.2), np.full(g.shape, -0.1))
    a = flow_diffeo(X, 1.0, 4)
    b = flow_diffeo(lambda t: X.scaled(2 * t), 1.0, 4)  # integral of 2t is 1
    assert np.allclose(a.displacement, b.displacement, atol=1e-14)


def test_folding_detected():
    g = TorusGrid.square(16)
    bad = GridDiffeo.from_function(g, lambda x, y: (x + 0.3 * np.sin(TWO_PI * x), y))
    with pytest.raises(FoldingError):
        bad.check_orientation()


def test_translation_jacobian():
    g = TorusGrid.square(16)
    phi = GridDiffeo.translation(g, (0.25, 0.5))
    assert np.allclose(phi.jacobian_det(), 1.0)


@pytest.mark.parametrize("field_kind", ["scalar", "one_form", "two_form", "surface_field",
                                        "area_form"])
def test_field_io_round_trip(tmp_path, field_kind):
    g = TorusGrid(16, 8)
    rng = np.random.default_rng(0)
    a, b = rng.random(g.shape), rng.random(g.shape)
    obj = {"scalar": a, "one_form": OneForm(a, b), "two_form": TwoForm(a),
           "surface_field": SurfaceField(a, b), "area_form": AreaForm(a + 1)}[field_kind]
    save_field(tmp_path / "f", obj)
    back = load_field(tmp_path / "f")
    assert type(back) is type(obj)
    if field_kind == "scalar":
        assert np.array_equal(back, a)
    elif field_kind in ("one_form",):
        assert np.array_equal(back.a, a) and np.array_equal(back.b, b)
    elif field_kind == "surface_field":
        assert np.array_equal(back.x1, a) and np.array_equal(back.x2, b)
    elif field_kind == "two_form":
        assert np.array_equal(back.g, a)
    else:
        assert np.array_equal(back.density, a + 1)


def test_partial_nyquist_dropped():
    g = TorusGrid.square(8)
    x, _ = g.coords()
    nyq = np.cos(np.pi * 8 * x)
    assert np.max(np.abs(partial(nyq, 0))) < 1e-14

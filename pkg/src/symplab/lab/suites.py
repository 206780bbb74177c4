"""Verification suites.  Each suite returns a :class:`SuiteReport`."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from ..ambient import AmbientModel, AmbientSymplectomorphism, ham_flow_tangent
from ..embedding import (Embedding, alpha, classify, compose_ambient, flat_torus, from_periodic,
                         is_symplectic_embedding, orthogonality_residual, reparametrize,
                         sheared_torus, split_tangent, tangential_lift, transport_field,
                         EXACT)
from ..errors import AreaMismatchError, SymplabError
from ..forms import (cr_residual, cr_variation_residual, d_omega_D_fd, jtilde, omega_D,
                     omega_S)
from ..moser import moser_reparametrize
from ..surface import (AreaForm, GridDiffeo, SurfaceField, TorusGrid, contract_area,
                       exterior_derivative, flow_diffeo, integrate_scalar, poisson_bracket,
                       surface_hamiltonian_field)
from .fields import FieldGenerator, suite_rng
from .report import Check, SuiteReport, digest
from .scenario import Scenario

N_TANGENTIAL = 20


@dataclass
class Context:
    scenario: Scenario
    name: str

    @cached_property
    def model(self) -> AmbientModel:
        return self.scenario.model()

    @cached_property
    def grid(self) -> TorusGrid:
        return self.scenario.grid()

    @cached_property
    def f(self) -> Embedding:
        return self.scenario.build_embedding(self.model)

    @cached_property
    def sigma(self) -> AreaForm:
        return self.scenario.area_form(self.f)

    @cached_property
    def gen(self) -> FieldGenerator:
        fs = self.scenario.fields
        return FieldGenerator(suite_rng(self.scenario.seed, self.name), fs.bandwidth, fs.amplitude)

    @property
    def tol(self) -> dict:
        return self.scenario.tolerances

    @property
    def samples(self) -> int:
        return self.scenario.fields.samples

    def flat_fixture(self):
        """f0 into the standard torus of the same dimension, sigma = dx^dy."""
        model = AmbientModel.standard(self.model.half_dim)
        return flat_torus(model, self.grid), AreaForm.constant(self.grid)


def _sup(a) -> float:
    return float(np.max(np.abs(a)))


def _e(dim, i, grid, scale=None):
    v = np.zeros(grid.shape + (dim,))
    v[..., i] = 1.0 if scale is None else scale
    return v


# -- horizontality of Hamiltonian restrictions ---------------------------------

def suite_vanish(ctx: Context) -> SuiteReport:
    rep = SuiteReport("vanish")
    f, sigma, gen, tol = ctx.f, ctx.sigma, ctx.gen, ctx.tol
    ws = [gen.sigma_hamiltonian(f, sigma)[0] for _ in range(N_TANGENTIAL)]
    for _ in range(ctx.samples):
        u, H = gen.exact_field(f)
        ins = digest(u)
        cls = classify(f, u, tol["closed"], tol["exact"])
        rep.add(Check.HAM_RESTRICTION_EXACT, max(map(abs, cls.periods)), tol["exact"], inputs=ins,
                detail={"verdict": cls.verdict})
        if cls.verdict != EXACT:
            rep.records[-1].residual = float("inf")
            continue
        h = cls.potential - np.mean(cls.potential)
        hf = H(f.lift)
        rep.add(Check.HAM_POTENTIAL, _sup(h - (hf - np.mean(hf))), tol["potential"], inputs=ins)
        pair = max(abs(omega_D(f, u, w, sigma).value) for w in ws)
        rep.add(Check.EXACT_PAIRS_TANGENTIAL_TO_ZERO, pair, tol["horizontal"], inputs=ins,
                detail={"tangential_fields": len(ws)})
    return rep


# -- converse probe (report only) ----------------------------------------------

def suite_probe_converse(ctx: Context) -> SuiteReport:
    """Reports, never asserts, whether pairing trivially with tangential
    area-preserving fields forces a field to be omega-orthogonal."""
    rep = SuiteReport("probe_converse")
    rep.notes["statement"] = ("probe: omega_D(v, w) = 0 for all tangential area-preserving w "
                              "versus v being omega-orthogonal (no tangential part)")
    f0, one = ctx.flat_fixture()
    grid, dim = ctx.grid, f0.model.dim
    x, _ = grid.coords()
    gen = ctx.gen
    ws = [gen.sigma_hamiltonian(f0, one)[0] for _ in range(N_TANGENTIAL)]
    ws.append(tangential_lift(f0, SurfaceField(np.ones(grid.shape), np.zeros(grid.shape))))

    def probe(label, f, sigma, v, tangentials):
        sp = split_tangent(f, v)
        pair = max(abs(omega_D(f, v, w, sigma).value) for w in tangentials)
        tang = float(np.sqrt(integrate_scalar(np.sum(sp.tangential ** 2, -1), sigma)))
        cls = classify(f, v, ctx.tol["closed"], ctx.tol["exact"])
        pairs_trivially = pair <= ctx.tol["horizontal"]
        orthogonal = tang <= ctx.tol["pointwise"]
        rep.add(Check.CONVERSE_PROBE, pair, ctx.tol["horizontal"], inputs=digest(v),
                asserted=False,
                detail={"family": label, "verdict": cls.verdict, "max_pairing": pair,
                        "tangential_norm": tang, "pairs_trivially": bool(pairs_trivially),
                        "omega_orthogonal": bool(orthogonal),
                        "counterexample": bool(pairs_trivially and not orthogonal)})

    v = _e(dim, 1, grid, -np.cos(2 * np.pi * x))
    probe("-cos(2 pi x) e2 on f0", f0, one, v, ws)
    probe("-0.7 e2 on f0", f0, one, _e(dim, 1, grid, -0.7), ws)
    for c in (0.5, 1.0):
        probe(f"-{c} cos(2 pi x) e2 on f0", f0, one, c * v, ws)
    f, sigma = ctx.f, ctx.sigma
    ws_f = [gen.sigma_hamiltonian(f, sigma)[0] for _ in range(N_TANGENTIAL)]
    for _ in range(min(ctx.samples, 10)):
        w_v, _ = gen.sigma_hamiltonian(f, sigma)
        probe("tangential area-preserving on scenario embedding", f, sigma, w_v, ws_f)
    return rep


# -- push-forward pairing versus omega_D ----------------------------------------

def suite_exact_coincidence(ctx: Context) -> SuiteReport:
    rep = SuiteReport("exact_coincidence")
    tol = ctx.tol
    f0, one = ctx.flat_fixture()
    grid, dim = ctx.grid, f0.model.dim
    x, _ = grid.coords()
    c = np.cos(2 * np.pi * x)
    u, v = _e(dim, 3, grid, -c), _e(dim, 2, grid, c)
    d = omega_D(f0, u, v, one).value
    s = omega_S(f0, u, v).value
    rep.add(Check.FACTOR_TWO_FIXTURE, abs(d - 0.5), tol["fixture"], detail={"omega_D": d})
    rep.add(Check.FACTOR_TWO_FIXTURE, abs(s - 1.0), tol["fixture"], detail={"omega_S": s})
    s2 = omega_S(f0, _e(dim, 3, grid, -1.0), _e(dim, 2, grid)).value
    rep.add(Check.FACTOR_TWO_FIXTURE, abs(s2 - 2.0), tol["fixture"], detail={"omega_S": s2})

    f, sigma, gen = ctx.f, ctx.sigma, ctx.gen
    for _ in range(ctx.samples):
        u, _ = gen.exact_field(f)
        v = gen.closed_field(f)
        d = omega_D(f, u, v, sigma).value
        s = omega_S(f, u, v).value
        rep.add(Check.FACTOR_TWO, abs(s - 2 * d) / (1 + abs(d)), tol["factor_two"],
                inputs=digest(u, v), detail={"omega_D": d, "omega_S": s})
    return rep


def suite_tangency(ctx: Context) -> SuiteReport:
    rep = SuiteReport("tangency")
    tol = ctx.tol["pointwise"]
    f0, _ = ctx.flat_fixture()
    grid, dim = ctx.grid, f0.model.dim
    g = omega_S(f0, _e(dim, 0, grid), _e(dim, 3, grid, -1.0)).integrand.g
    rep.add(Check.TANGENTIAL_INTEGRAND_VANISHES, _sup(g), tol, detail={"fixture": "e1, -e4 on f0"})
    f, gen = ctx.f, ctx.gen
    for _ in range(ctx.samples):
        tau = tangential_lift(f, gen.surface_field(f.grid, 1.0))
        v = gen.closed_field(f)
        g = omega_S(f, tau, v).integrand.g
        rep.add(Check.TANGENTIAL_INTEGRAND_VANISHES, _sup(g), tol, inputs=digest(tau, v))
    # symplectic immersion whose pullback is not the reference area form
    fa = sheared_torus(f0.model, grid, 0.3)
    for _ in range(5):
        tau = tangential_lift(fa, gen.surface_field(grid, 1.0))
        v = gen.closed_field(fa)
        g = omega_S(fa, tau, v).integrand.g
        rep.add(Check.TANGENTIAL_INTEGRAND_IMMERSION, _sup(g), tol, inputs=digest(tau, v),
                detail={"embedding": "sheared a=0.3"})
    for _ in range(5):
        _split_records(rep, f, gen.vector(f.grid, f.model.dim), ctx.tol, closed=False)
        _split_records(rep, f, gen.closed_field(f), ctx.tol, closed=True)
    return rep


# -- splitting -------------------------------------------------------------------

def _split_records(rep, f, v, tol, closed: bool):
    sp = split_tangent(f, v)
    ins = digest(v)
    rep.add(Check.SPLIT_RECONSTRUCTS, _sup(sp.tangential + sp.orthogonal - v), tol["reconstruct"],
            inputs=ins)
    scale = 1.0 + _sup(v)
    rep.add(Check.SPLIT_ORTHOGONAL, sp.orthogonality / scale, tol["pointwise"], inputs=ins)
    a, b = split_tangent(f, sp.tangential), split_tangent(f, sp.orthogonal)
    idem = max(_sup(a.tangential - sp.tangential), _sup(a.orthogonal),
               _sup(b.tangential), _sup(b.orthogonal - sp.orthogonal))
    rep.add(Check.SPLIT_IDEMPOTENT, idem / scale, tol["pointwise"], inputs=ins)
    if closed:
        r = _sup(exterior_derivative(contract_area(sp.coefficients, f.area_form())).g)
        rep.add(Check.SPLIT_CLOSED_PRESERVES_AREA, r, tol["closed"], inputs=ins)


# -- almost complex structure ---------------------------------------------------------

def suite_compat(ctx: Context) -> SuiteReport:
    rep = SuiteReport("compat")
    f, sigma, gen, tol = ctx.f, ctx.sigma, ctx.gen, ctx.tol
    for i in range(2 * ctx.samples):
        v = gen.vector(f.grid, f.model.dim)
        Jv = jtilde(f, v)
        val = omega_D(f, v, Jv, sigma).value
        rep.add(Check.TAMED, val, 0.0, kind="min", inputs=digest(v))
        if i < 10:
            rep.add(Check.J_SQUARES_TO_MINUS_ONE, _sup(jtilde(f, Jv) + v), tol["pointwise"],
                    inputs=digest(v))
    for _ in range(ctx.samples):
        v1, v2 = gen.vector(f.grid, f.model.dim), gen.vector(f.grid, f.model.dim)
        d = omega_D(f, v1, v2, sigma).value
        dj = omega_D(f, jtilde(f, v1), jtilde(f, v2), sigma).value
        rep.add(Check.COMPATIBLE, abs(dj - d), tol["compat"], inputs=digest(v1, v2))
    return rep


# -- invariance ----------------------------------------------------------------------

def suite_invariance(ctx: Context) -> SuiteReport:
    rep = SuiteReport("invariance")
    f, sigma, gen, tol = ctx.f, ctx.sigma, ctx.gen, ctx.tol
    flow = ctx.scenario.flow
    dim = f.model.dim
    pairs = [(gen.vector(f.grid, dim, 1.0), gen.vector(f.grid, dim, 1.0)) for _ in range(5)]
    base = [omega_D(f, v, w, sigma).value for v, w in pairs]

    # (a) reparametrisation by an area-preserving flow
    psi = gen.scalar(f.grid, flow.amplitude)
    phi = flow_diffeo(surface_hamiltonian_field(psi, sigma), 1.0, flow.steps, flow.interp)
    g = reparametrize(f, phi, flow.interp)
    rep.add(Check.SYMPL_REPARAM_PULLBACK, is_symplectic_embedding(g, sigma).residual,
            tol["reparam_pullback"], inputs=digest(psi),
            detail={"steps": flow.steps, "interp": flow.interp})
    for (v, w), b in zip(pairs, base):
        val = omega_D(g, transport_field(v, phi, flow.interp),
                      transport_field(w, phi, flow.interp), sigma).value
        rep.add(Check.SYMPL_INVARIANCE, abs(val - b), tol["sympl_invariance"],
                inputs=digest(psi, v, w), detail={"omega_D": b})

    # (b) left composition with a Hamiltonian flow, differential-transported fields
    H = gen.hamiltonian(dim, amplitude=flow.ham_amplitude)
    s0 = flow.ham_steps
    errs = []
    for steps in (s0, 2 * s0, 4 * s0):
        q, Phi = ham_flow_tangent(f.model, H, f.lift, 1.0, steps)
        fh = Embedding(f.model, q, f.winding)
        push = lambda v: np.einsum("...ab,...b->...a", Phi, v)
        err = max(abs(omega_D(fh, push(v), push(w), sigma).value - b)
                  for (v, w), b in zip(pairs, base))
        errs.append(err)
        bound = tol["ham_constant"] * steps ** -4.0 + tol["ham_spatial"] * f.grid.nx ** -2.0
        rep.add(Check.HAM_INVARIANCE, err, bound, inputs=digest(f.lift),
                detail={"steps": steps, "bound": "C*steps^-4 + C'*N^-2",
                        "C": tol["ham_constant"], "C'": tol["ham_spatial"]})
    for e1, e2, st in zip(errs, errs[1:], (s0, 2 * s0)):
        order = float(np.log2(e1 / e2)) if e1 > 0 and e2 > 0 else float("nan")
        rep.add(Check.HAM_ORDER, order, tol["ham_order"], kind="range",
                detail={"steps": [st, 2 * st], "errors": [e1, e2]})
    rep.notes["ham_group"] = ("Hamiltonian flow of a random trigonometric H; the distinction "
                              "between Ham and Sympl is recorded, not asserted")

    # (c) non-area-preserving reparametrisations break the pullback condition
    f0, one = ctx.flat_fixture()
    bad = GridDiffeo.from_function(ctx.grid, lambda x, y: (x + 0.1 * np.sin(2 * np.pi * x), y))
    r0 = is_symplectic_embedding(reparametrize(f0, bad), one).residual
    rep.add(Check.NON_AREA_PRESERVING_BREAKS, r0, tol["area_break"], kind="min",
            detail={"embedding": "f0", "expected": 0.2 * np.pi})
    r1 = is_symplectic_embedding(reparametrize(f, bad), sigma).residual
    rep.add(Check.NON_AREA_PRESERVING_BREAKS, r1, tol["area_break"], kind="min",
            detail={"embedding": "scenario"})
    return rep


# -- reduced pairing -------------------------------------------------------------------

def suite_reduction(ctx: Context) -> SuiteReport:
    rep = SuiteReport("reduction")
    f, sigma, gen, tol = ctx.f, ctx.sigma, ctx.gen, ctx.tol
    for _ in range(ctx.samples):
        x1, _ = gen.exact_field(f)
        x2, _ = gen.exact_field(f)
        w1, p1 = gen.sigma_hamiltonian(f, sigma)
        w2, p2 = gen.sigma_hamiltonian(f, sigma)
        ins = digest(x1, x2, w1, w2)
        ref = omega_D(f, x1, x2, sigma).value
        val = omega_D(f, x1 + w1, x2 + w2, sigma).value
        rep.add(Check.REDUCED_PAIRING_WELL_DEFINED, abs(val - ref), tol["reduction"], inputs=ins)
        br = integrate_scalar(poisson_bracket(p1, p2, sigma), sigma)
        rep.add(Check.BRACKET_INTEGRATES_TO_ZERO, abs(br), tol["bracket"], inputs=digest(p1, p2))
        vs = omega_S(f, x1 + w1, x2 + w2).value
        rep.add(Check.REDUCED_FACTOR_TWO, abs(vs - 2 * ref), tol["reduction"], inputs=ins)
    return rep


# -- holomorphic curves ---------------------------------------------------------------

def _holomorphic_family(model: AmbientModel, grid: TorusGrid):
    """Affine tori F = W p with second column J times the first (integer J only)."""
    from ..ambient import compatible_J_at
    J = np.asarray(compatible_J_at(model, np.zeros(model.dim)))
    out = []
    if not np.allclose(J, np.round(J)):
        return out, J
    J = np.round(J)
    for first in (np.eye(model.dim)[0], np.eye(model.dim)[0] + np.eye(model.dim)[2]):
        W = np.stack([first, J @ first], axis=1).astype(int)
        out.append(from_periodic(model, grid, W))
    return out, J


def suite_holomorphic(ctx: Context) -> SuiteReport:
    rep = SuiteReport("holomorphic")
    tol = ctx.tol
    model = ctx.model.constant_part()
    rep.notes["model"] = "constant part of the scenario form (holomorphic tori need constant J)"
    family, J = _holomorphic_family(model, ctx.grid)
    gen = ctx.gen
    if not family:
        rep.notes["skipped"] = "compatible J of the constant part is not integral"
    for f in family:
        one = f.area_form()
        label = {"winding": f.winding.tolist()}
        rep.add(Check.CR_HOLOMORPHIC, _sup(cr_residual(f)), tol["cr"], detail=label)
        for _ in range(10):
            tau = tangential_lift(f, gen.surface_field(f.grid, 1.0))
            rep.add(Check.J_PRESERVES_TANGENT, _sup(split_tangent(f, jtilde(f, tau)).orthogonal),
                    tol["holomorphic"], inputs=digest(tau), detail=label)
            xi = gen.orthogonal_field(f)
            rep.add(Check.J_PRESERVES_ORTHOGONAL, orthogonality_residual(f, jtilde(f, xi)),
                    tol["holomorphic"], inputs=digest(xi), detail=label)
            v = gen.vector(f.grid, model.dim, 1.0)
            sp, spj = split_tangent(f, v), split_tangent(f, jtilde(f, v))
            r = max(_sup(spj.tangential - jtilde(f, sp.tangential)),
                    _sup(spj.orthogonal - jtilde(f, sp.orthogonal)))
            rep.add(Check.J_COMMUTES_WITH_SPLIT, r, tol["holomorphic"], inputs=digest(v),
                    detail=label)
            r = _sup(cr_variation_residual(f, jtilde(f, v), J) - cr_variation_residual(f, v, J))
            rep.add(Check.VARIATION_CLOSED_UNDER_J, r, tol["holomorphic"], inputs=digest(v),
                    detail=label)
        const = np.broadcast_to(gen.rng.normal(size=model.dim), f.lift.shape)
        rep.add(Check.VARIATION_CLOSED_UNDER_J,
                max(_sup(cr_variation_residual(f, const, J)),
                    _sup(cr_variation_residual(f, jtilde(f, const), J))),
                tol["holomorphic"], detail={**label, "field": "constant"})
        for A, shift in _holomorphic_maps(model, gen):
            phi = AmbientSymplectomorphism.for_model(model, A, shift)
            if not (phi.is_symplectic and phi.is_holomorphic):
                continue
            g = compose_ambient(phi, f)
            r = max(_sup(g.pullback.g - f.pullback.g), _sup(cr_residual(g)))
            rep.add(Check.COMPOSITION_PRESERVES, r, tol["holomorphic"],
                    detail={**label, "map": np.asarray(A).tolist()})
        for _ in range(ctx.samples):
            v = gen.vector(f.grid, model.dim, 1.0)
            sp = split_tangent(f, v)
            q = omega_D(f, sp.orthogonal, jtilde(f, sp.orthogonal), one).value
            full = omega_D(f, v, jtilde(f, v), one).value
            cross = omega_D(f, sp.orthogonal, jtilde(f, sp.tangential), one).value
            ins = digest(v)
            rep.add(Check.ORTHOGONAL_TAMED, q, 0.0, kind="min", inputs=ins, detail=label)
            rep.add(Check.ORTHOGONAL_DOMINATES, max(q - full, 0.0), tol["compat"], inputs=ins)
            rep.add(Check.ORTHOGONAL_TANGENTIAL_J, abs(cross), tol["compat"], inputs=ins)
    f0 = family[0] if family else None
    if f0 is not None:
        fa = sheared_torus(model, ctx.grid, 0.3)
        rep.add(Check.CR_NOT_HOLOMORPHIC, _sup(cr_residual(fa)), tol["holomorphic"], kind="min",
                detail={"embedding": "sheared a=0.3"})
    return rep


def _holomorphic_maps(model: AmbientModel, gen: FieldGenerator):
    d = model.dim
    swap = np.eye(d, dtype=int)
    swap[[0, 1, 2, 3]] = swap[[2, 3, 0, 1]]
    yield np.eye(d, dtype=int), gen.rng.random(d)
    yield swap, np.zeros(d)
    yield swap, gen.rng.random(d)


# -- closedness ------------------------------------------------------------------------

def suite_closedness(ctx: Context) -> SuiteReport:
    rep = SuiteReport("closedness")
    tol, gen = ctx.tol, ctx.gen
    f, sigma = ctx.f, ctx.sigma
    dim = f.model.dim
    const = Embedding(f.model.constant_part(), f.lift, f.winding)
    hs = [1e-2 / 2 ** k for k in range(4)]
    for _ in range(5):
        V = [gen.vector(f.grid, dim, 1.0) for _ in range(3)]
        ins = digest(*V)
        r = max(d_omega_D_fd(const, *V, h, sigma) for h in hs)
        rep.add(Check.CLOSEDNESS_CONSTANT, r, tol["closedness_constant"], inputs=ins)
        if f.model.is_constant:
            continue
        res = [d_omega_D_fd(f, *V, h, sigma) for h in hs]
        for h, a, b in zip(hs, res, res[1:]):
            rep.add(Check.CLOSEDNESS_ORDER, a / b if b > 0 else float("inf"),
                    tol["closedness_ratio"], kind="range", inputs=ins,
                    detail={"h": h, "residuals": [a, b]})
    if f.model.is_constant:
        rep.notes["order"] = "constant model: convergence ratios not applicable"
    return rep


# -- Moser -------------------------------------------------------------------------------

def moser_oracle(x: np.ndarray, a: float) -> np.ndarray:
    """u with u + a sin(2 pi u) / (2 pi) = x, per point."""
    fn = lambda u, xx: u + a / (2 * np.pi) * np.sin(2 * np.pi * u) - xx
    return np.array([brentq(fn, xx - 1.0, xx + 1.0, args=(xx,), xtol=1e-15)
                     for xx in np.ravel(x)]).reshape(np.shape(x))


def suite_moser(ctx: Context) -> SuiteReport:
    rep = SuiteReport("moser")
    tol, ms = ctx.tol, ctx.scenario.moser
    model = AmbientModel.standard(ctx.model.half_dim)
    grid = TorusGrid.square(ms.N)
    one = AreaForm.constant(grid)
    fa = sheared_torus(model, grid, ms.a)
    res = moser_reparametrize(fa, one, ms.steps, tol["moser"], ms.interp)
    detail = {"a": ms.a, "N": ms.N, "steps": ms.steps, "interp": ms.interp}
    rep.add(Check.MOSER_RESIDUAL, res.residual, tol["moser"], detail=detail)
    x, y = grid.coords()
    lift = res.phi.lift()
    err = max(_sup(lift[..., 0] - moser_oracle(x[:, :1], ms.a)), _sup(lift[..., 1] - y))
    rep.add(Check.MOSER_ORACLE, err, tol["moser_oracle"], detail=detail)
    rep.add(Check.MOSER_ORIENTATION, res.min_jacobian, 0.0, kind="min", detail=detail)
    again = moser_reparametrize(res.embedding, one, ms.steps, tol["moser"], ms.interp)
    rep.add(Check.MOSER_IDEMPOTENT, _sup(again.phi.displacement), tol["moser_idempotence"],
            detail=detail)
    try:
        moser_reparametrize(fa, AreaForm.constant(grid, 2.0), ms.steps)
        rejected = 0.0
    except AreaMismatchError:
        rejected = 1.0
    rep.add(Check.MOSER_AREA_MISMATCH, rejected, 0.5, kind="min",
            detail={"pullback_area": 1.0, "sigma_area": 2.0})
    # the scenario embedding, normalised to the uniform density of equal area
    f = ctx.f
    if f.is_symplectic_surface():
        target = AreaForm.constant(f.grid, float(np.mean(f.pullback.g)))
        r = moser_reparametrize(f, target, ms.steps, tol["moser"], ms.interp)
        rep.add(Check.MOSER_SCENARIO, r.residual, tol["moser"], detail=r.to_dict())
    return rep


SUITE_FUNCS = {
    "vanish": suite_vanish,
    "probe_converse": suite_probe_converse,
    "exact_coincidence": suite_exact_coincidence,
    "tangency": suite_tangency,
    "compat": suite_compat,
    "invariance": suite_invariance,
    "reduction": suite_reduction,
    "holomorphic": suite_holomorphic,
    "closedness": suite_closedness,
    "moser": suite_moser,
}


def run_suite(scenario: Scenario, name: str) -> SuiteReport:
    """Run one suite; numerical failures become a failed record, not an exception."""
    if name not in SUITE_FUNCS:
        raise KeyError(f"unknown suite {name!r}")
    try:
        return SUITE_FUNCS[name](Context(scenario, name))
    except (SymplabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        rep = SuiteReport(name)
        rep.add(Check.SUITE_ERROR, float("inf"), 0.0, detail={"error": f"{type(exc).__name__}: {exc}"})
        return rep

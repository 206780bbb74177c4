"""Moser normalisation of the pulled-back area form."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import Embedding, reparametrize
from .errors import AreaMismatchError, PositivityError
from .surface import (AreaForm, GridDiffeo, Interpolant, exterior_derivative, integrate_points,
                      poisson_solve)

AREA_TOL = 1e-8


@dataclass(frozen=True)
class MoserResult:
    phi: GridDiffeo = field(repr=False)
    embedding: Embedding = field(repr=False)
    residual: float
    min_density: float
    steps: int
    min_jacobian: float
    converged: bool

    def to_dict(self) -> dict:
        return {"residual": self.residual, "min_density": self.min_density,
                "steps": self.steps, "min_jacobian": self.min_jacobian,
                "converged": self.converged,
                "max_displacement": float(np.max(np.abs(self.phi.displacement)))}


def moser_reparametrize(f: Embedding, sigma: AreaForm, steps: int = 50, tol: float = 1e-4,
                        mode: str = "spline") -> MoserResult:
    """Find phi with (f o phi)^* omega ~ sigma.

    Path rho_t = (1 - t) rho + t s between sigma and the pullback s; with
    Laplacian u = s - rho the field X_t = -grad u / rho_t satisfies
    iota_{X_t} rho_t = -beta for beta = -u_y dx + u_x dy, d beta = s - rho,
    so its time-one flow pulls s back to rho.
    """
    rho = sigma.density
    s = f.pullback.g
    if rho.shape != s.shape:
        raise ValueError("area form and embedding live on different grids")
    gap = abs(float(np.mean(s)) - float(np.mean(rho)))
    if gap > AREA_TOL:
        raise AreaMismatchError(f"total areas differ by {gap:.3e}")
    # rho_t is affine in t, so its minimum over the path is attained at an end
    min_density = float(min(rho.min(), s.min()))
    if min_density <= 0:
        raise PositivityError(f"interpolated area form reaches {min_density:.3e}")

    g = s - rho
    u = poisson_solve(g - np.mean(g), mean_tol=np.inf)
    du = exterior_derivative(u)
    interp = Interpolant(np.stack([du.a, du.b, rho, s], axis=-1), mode)

    def vel(t, p):
        val = interp(p)
        rho_t = (1.0 - t) * val[..., 2] + t * val[..., 3]
        return -val[..., :2] / rho_t[..., None]

    p0 = f.grid.points()
    phi = GridDiffeo(integrate_points(vel, p0, 1.0, steps) - p0)
    phi.check_orientation()
    g_out = reparametrize(f, phi, mode)
    residual = float(np.max(np.abs(g_out.pullback.g - rho)))
    return MoserResult(phi, g_out, residual, min_density, steps,
                       float(phi.jacobian_det().min()), residual <= tol)

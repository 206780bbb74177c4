"""Maps of the torus into (T^{2n}, omega) stored as grid lifts with winding.

A tangent field (section of f^*TM) is a plain ``(N_x, N_y, 2n)`` array: the
ambient bundle is globally trivialised by the flat coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .ambient import AmbientModel, AmbientSymplectomorphism, ScalarHamiltonian, hamiltonian_vector
from .errors import ImmersionError, NotSymplecticMapError, NotSymplecticSurfaceError
from .surface import (AreaForm, GridDiffeo, HodgeSplit, Interpolant, OneForm, SurfaceField,
                      TorusGrid, TwoForm, exterior_derivative, hodge_split, partial)

GRAM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Embedding:
    """Grid lift ``F`` of a map f: T^2 -> T^{2n}.

    ``F(x + 1, y) = F(x, y) + W[:, 0]`` and likewise in y, so
    ``F - W @ (x, y)`` is periodic and is what gets differentiated.
    Construction fails with :class:`ImmersionError` unless the two columns of
    the differential are independent at every grid point.
    """

    model: AmbientModel
    lift: np.ndarray = field(repr=False)
    winding: np.ndarray = field(repr=False)

    def __post_init__(self):
        F = np.asarray(self.lift, dtype=float)
        W = np.asarray(self.winding)
        if F.ndim != 3 or F.shape[-1] != self.model.dim:
            raise ValueError(f"lift must have shape (N_x, N_y, {self.model.dim})")
        if W.shape != (self.model.dim, 2) or not np.allclose(W, np.round(W)):
            raise ValueError("winding must be an integer (2n, 2) matrix")
        TorusGrid.of(F)
        F.setflags(write=False)
        object.__setattr__(self, "lift", F)
        object.__setattr__(self, "winding", np.round(W).astype(int))
        gram = self.gram_det
        if not np.all(gram > GRAM_TOL):
            raise ImmersionError(f"not an immersion: min Gram determinant {gram.min():.3e}")

    @property
    def grid(self) -> TorusGrid:
        return TorusGrid.of(self.lift)

    @cached_property
    def periodic_part(self) -> np.ndarray:
        return self.lift - self.grid.points() @ self.winding.T

    @cached_property
    def differential(self) -> np.ndarray:
        """D as (N_x, N_y, 2n, 2); columns are dF/dx, dF/dy."""
        P = self.periodic_part
        return np.stack([partial(P, 0), partial(P, 1)], axis=-1) + self.winding

    @property
    def fx(self) -> np.ndarray:
        return self.differential[..., 0]

    @property
    def fy(self) -> np.ndarray:
        return self.differential[..., 1]

    @cached_property
    def gram_det(self) -> np.ndarray:
        D = self.differential
        G = np.swapaxes(D, -1, -2) @ D
        return np.linalg.det(G)

    @cached_property
    def omega(self) -> np.ndarray:
        """omega evaluated along the image, (N_x, N_y, 2n, 2n)."""
        return self.model.omega(self.lift)

    @cached_property
    def pullback(self) -> TwoForm:
        """f^*omega = s dx^dy with s = omega(dF/dx, dF/dy)."""
        return TwoForm(self.pair(self.fx, self.fy))

    def pair(self, u, v) -> np.ndarray:
        return np.einsum("...a,...ab,...b->...", u, self.omega, v)

    def is_symplectic_surface(self) -> bool:
        return bool(np.all(self.pullback.g > 0))

    def area_form(self) -> AreaForm:
        """The pullback as an area form (only for symplectic surfaces)."""
        if not self.is_symplectic_surface():
            raise NotSymplecticSurfaceError("pullback density is not positive everywhere")
        return AreaForm(self.pullback.g)

    def differential_and_pullback(self):
        return self.differential, self.pullback


def differential_and_pullback(f: Embedding):
    return f.differential, f.pullback


# -- families ----------------------------------------------------------------

def from_periodic(model: AmbientModel, grid: TorusGrid, winding, periodic=None) -> Embedding:
    W = np.asarray(winding)
    F = grid.points() @ W.T
    if periodic is not None:
        F = F + periodic
    return Embedding(model, F, W)


def standard_winding(dim: int) -> np.ndarray:
    W = np.zeros((dim, 2), dtype=int)
    W[0, 0] = W[1, 1] = 1
    return W


def flat_torus(model: AmbientModel, grid: TorusGrid) -> Embedding:
    """f0(x, y) = (x, y, 0, ..., 0)."""
    return from_periodic(model, grid, standard_winding(model.dim))


def sheared_torus(model: AmbientModel, grid: TorusGrid, a: float) -> Embedding:
    """f_a(x, y) = (x + a sin(2 pi x) / (2 pi), y, 0, ...); pullback 1 + a cos(2 pi x)."""
    x, _ = grid.coords()
    P = np.zeros(grid.shape + (model.dim,))
    P[..., 0] = a / (2 * np.pi) * np.sin(2 * np.pi * x)
    return from_periodic(model, grid, standard_winding(model.dim), P)


def graph_torus(model: AmbientModel, grid: TorusGrid, normal: np.ndarray) -> Embedding:
    """(x, y, g_1(x, y), ..., g_{2n-2}(x, y)) for periodic normal components."""
    P = np.zeros(grid.shape + (model.dim,))
    P[..., 2:] = normal
    return from_periodic(model, grid, standard_winding(model.dim), P)


def linear_torus(model: AmbientModel, grid: TorusGrid, winding, offset=None) -> Embedding:
    """Affine torus F(p) = W p + offset."""
    P = None if offset is None else np.broadcast_to(np.asarray(offset, float), grid.shape + (model.dim,))
    return from_periodic(model, grid, winding, P)


# -- pullback checks ---------------------------------------------------------

class SymplecticCheck(NamedTuple):
    residual: float
    ok: bool


def is_symplectic_embedding(f: Embedding, sigma: AreaForm, tol: float = 1e-8) -> SymplecticCheck:
    """sup |s - rho|, flagged ok iff within ``tol``."""
    r = float(np.max(np.abs(f.pullback.g - sigma.density)))
    return SymplecticCheck(r, r <= tol)


# -- alpha_v and the tangential / omega-orthogonal splitting -------------------

def alpha(f: Embedding, v: np.ndarray) -> OneForm:
    """alpha_v = omega(v, df .) as a grid 1-form."""
    return OneForm(f.pair(v, f.fx), f.pair(v, f.fy))


@dataclass(frozen=True)
class SplitResult:
    tangential: np.ndarray
    orthogonal: np.ndarray
    coefficients: SurfaceField
    orthogonality: float = 0.0


def tangential_lift(f: Embedding, X: SurfaceField) -> np.ndarray:
    """df(X) pointwise."""
    return f.fx * X.x1[..., None] + f.fy * X.x2[..., None]


def split_tangent(f: Embedding, v: np.ndarray) -> SplitResult:
    """v = tau_v + xi_v with tau_v = df(X) and alpha_{xi_v} = 0.

    Per point: X^1 = b / s, X^2 = -a / s where (a, b) = alpha_v and s is the
    pullback density.
    """
    s = f.pullback.g
    if not np.all(s > 0):
        raise NotSymplecticSurfaceError("splitting needs a symplectic surface (s > 0)")
    al = alpha(f, v)
    X = SurfaceField(al.b / s, -al.a / s)
    tau = tangential_lift(f, X)
    xi = v - tau
    return SplitResult(tau, xi, X, orthogonality_residual(f, xi))


def orthogonality_residual(f: Embedding, xi: np.ndarray) -> float:
    return alpha(f, xi).sup()


# -- classification ------------------------------------------------------------

EXACT = "exact"
CLOSED = "closed-not-exact"
NOT_CLOSED = "not-closed"


@dataclass(frozen=True)
class Classification:
    verdict: str
    closed_residual: float
    periods: tuple[float, float]
    potential: Optional[np.ndarray] = field(default=None, repr=False)
    split_residual: float = float("nan")

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "closed_residual": self.closed_residual,
                "periods": list(self.periods)}


def classify(f: Embedding, v: np.ndarray, closed_tol: float = 1e-8,
             exact_tol: float = 1e-8) -> Classification:
    al = alpha(f, v)
    closed_res = float(np.max(np.abs(exterior_derivative(al).g)))
    if closed_res > closed_tol:
        return Classification(NOT_CLOSED, closed_res,
                              (float(np.mean(al.a)), float(np.mean(al.b))))
    hs: HodgeSplit = hodge_split(al, closed_tol)
    if hs.is_exact(exact_tol):
        return Classification(EXACT, closed_res, hs.periods, hs.potential, hs.residual)
    return Classification(CLOSED, closed_res, hs.periods, None, hs.residual)


def hamiltonian_restriction(f: Embedding, H: ScalarHamiltonian) -> np.ndarray:
    """i^* V_H: the ambient Hamiltonian field sampled along the image."""
    return hamiltonian_vector(f.model, H, f.lift)


# -- reparametrisation and ambient composition ---------------------------------

def reparametrize(f: Embedding, phi: GridDiffeo, mode: str = "spline") -> Embedding:
    """f o phi with lift W phi~(p) + P(phi(p)), P the periodic part of F."""
    phi.check_orientation()
    pts = phi.lift()
    P = Interpolant(f.periodic_part, mode)(pts)
    return Embedding(f.model, pts @ f.winding.T + P, f.winding)


def transport_field(v: np.ndarray, phi: GridDiffeo, mode: str = "spline") -> np.ndarray:
    """v o phi, a section along f o phi."""
    return Interpolant(v, mode)(phi.lift())


def compose_ambient(phi: AmbientSymplectomorphism, f: Embedding, tol: float = 1e-10) -> Embedding:
    """phi o f for an affine symplectomorphism; checks phi^* omega = omega on the image."""
    if not phi.is_symplectic:
        raise NotSymplecticMapError("map does not preserve the constant part of omega")
    new_lift = phi.apply_lift(f.lift)
    if not f.model.is_constant:
        A = phi.matrix
        pulled = np.swapaxes(A, 0, 1) @ f.model.omega(new_lift) @ A
        err = float(np.max(np.abs(pulled - f.omega)))
        if err > tol:
            raise NotSymplecticMapError(f"map does not preserve omega on the image ({err:.3e})")
    return Embedding(f.model, new_lift, phi.matrix @ f.winding)


# -- file format -------------------------------------------------------------

def save_embedding(path, f: Embedding) -> Path:
    """JSON header ``<path>.json`` plus row-major little-endian float64 lift."""
    path = Path(path)
    header_path, payload = path.with_suffix(".json"), path.with_suffix(".bin")
    payload.write_bytes(np.ascontiguousarray(f.lift, dtype="<f8").tobytes())
    header = {"n": f.model.half_dim, "N_x": f.grid.nx, "N_y": f.grid.ny,
              "winding": f.winding.tolist(), "payload": payload.name}
    header_path.write_text(json.dumps(header, indent=2))
    return header_path


def load_embedding(path, model: Optional[AmbientModel] = None) -> Embedding:
    header_path = Path(path).with_suffix(".json")
    header = json.loads(header_path.read_text())
    n, nx, ny = int(header["n"]), int(header["N_x"]), int(header["N_y"])
    if model is None:
        model = AmbientModel.standard(n)
    elif model.half_dim != n:
        raise ValueError(f"embedding file has n={n}, model has n={model.half_dim}")
    raw = np.frombuffer((header_path.parent / header["payload"]).read_bytes(), dtype="<f8")
    if raw.size != nx * ny * 2 * n:
        raise ValueError("payload size does not match header")
    return Embedding(model, raw.reshape(nx, ny, 2 * n).astype(float), np.array(header["winding"]))

"""Periodic spectral calculus on the flat 2-torus.

Grid fields are numpy arrays whose first two axes are the ``(N_x, N_y)``
collocation grid ``(i / N_x, j / N_y)``; any trailing axes are components.
Differentiation is exact for band-limited data.  First-derivative symbols
drop the Nyquist mode so that real fields stay real and ``d o d = 0`` holds
to rounding.  Band-limitedness of inputs is assumed, not enforced.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np
from scipy import ndimage

from .errors import FoldingError, NonZeroMeanError, NotClosedError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TorusGrid:
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError(f"grid must be at least 8x8, got {self.nx}x{self.ny}")

    @classmethod
    def square(cls, n: int) -> "TorusGrid":
        return cls(n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx) / self.nx
        y = np.arange(self.ny) / self.ny
        return np.meshgrid(x, y, indexing="ij")

    def points(self) -> np.ndarray:
        """Grid points as an ``(N_x, N_y, 2)`` array."""
        return np.stack(self.coords(), axis=-1)

    @classmethod
    def of(cls, field: np.ndarray) -> "TorusGrid":
        return cls(field.shape[0], field.shape[1])


@dataclass(frozen=True)
class AreaForm:
    """sigma = density dx^dy with density > 0."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=float)
        if rho.ndim != 2:
            raise ValueError("density must be a 2-D grid array")
        if not np.all(rho > 0):
            raise ValueError("area density must be positive everywhere")
        object.__setattr__(self, "density", rho)

    @classmethod
    def constant(cls, grid: TorusGrid, value: float = 1.0) -> "AreaForm":
        return cls(np.full(grid.shape, float(value)))

    @property
    def total(self) -> float:
        return float(np.mean(self.density))


@dataclass(frozen=True)
class OneForm:
    """a dx + b dy."""

    a: np.ndarray
    b: np.ndarray

    def __add__(self, other):
        return OneForm(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return OneForm(self.a - other.a, self.b - other.b)

    def sup(self) -> float:
        return float(max(np.max(np.abs(self.a)), np.max(np.abs(self.b))))


@dataclass(frozen=True)
class TwoForm:
    """g dx^dy."""

    g: np.ndarray


@dataclass(frozen=True)
class SurfaceField:
    """Vector field X^1 d/dx + X^2 d/dy on the torus."""

    x1: np.ndarray
    x2: np.ndarray

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SurfaceField":
        return cls(np.zeros(grid.shape), np.zeros(grid.shape))

    def stacked(self) -> np.ndarray:
        return np.stack([self.x1, self.x2], axis=-1)

    def __add__(self, other):
        return SurfaceField(self.x1 + other.x1, self.x2 + other.x2)

    def scaled(self, c) -> "SurfaceField":
        return SurfaceField(c * self.x1, c * self.x2)


# -- spectral differentiation -------------------------------------------------

def _wavenumbers(n: int, nyquist: bool) -> np.ndarray:
    k = np.fft.rfftfreq(n, 1.0 / n)
    if not nyquist and n % 2 == 0:
        k[-1] = 0.0
    return TWO_PI * k


def _shape_symbol(k, axis, ndim):
    shape = [1] * ndim
    shape[axis] = k.size
    return k.reshape(shape)


def partial(field: np.ndarray, axis: int) -> np.ndarray:
    """d/dx (axis 0) or d/dy (axis 1) of a grid field with trailing components."""
    field = np.asarray(field, dtype=float)
    n = field.shape[axis]
    k = _shape_symbol(_wavenumbers(n, nyquist=False), axis, field.ndim)
    return np.fft.irfft(1j * k * np.fft.rfft(field, axis=axis), n=n, axis=axis)


def laplacian(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    nx, ny = u.shape[:2]
    kx = TWO_PI * np.fft.fftfreq(nx, 1.0 / nx)
    ky = _wavenumbers(ny, nyquist=True)
    sym = -(kx[:, None] ** 2 + ky[None, :] ** 2)
    return np.fft.irfft2(sym * np.fft.rfft2(u), s=(nx, ny))


def exterior_derivative(x: Union[np.ndarray, OneForm]):
    """d on scalars (-> OneForm) and on 1-forms (-> TwoForm)."""
    if isinstance(x, OneForm):
        return TwoForm(partial(x.b, 0) - partial(x.a, 1))
    h = np.asarray(x, dtype=float)
    return OneForm(partial(h, 0), partial(h, 1))


def integrate(g: TwoForm) -> float:
    """Trapezoidal (= spectral) quadrature of a 2-form over the unit torus."""
    return float(np.mean(g.g))


def integrate_scalar(h: np.ndarray, sigma: AreaForm) -> float:
    return float(np.mean(np.asarray(h) * sigma.density))


# -- Hodge splitting and Poisson ---------------------------------------------

@dataclass(frozen=True)
class HodgeSplit:
    """alpha = d potential + px dx + py dy (flat harmonic part)."""

    potential: np.ndarray
    periods: tuple[float, float]
    residual: float
    closed_residual: float

    def is_exact(self, tol: float) -> bool:
        return max(abs(self.periods[0]), abs(self.periods[1])) <= tol


def hodge_split(alpha: OneForm, closed_tol: float = 1e-8) -> HodgeSplit:
    """Split a closed 1-form into exact part and periods.

    Periods are the grid means of the components, i.e. averages of the line
    integrals over all parallel generator cycles.  Raises
    :class:`NotClosedError` when ``|d alpha|_inf > closed_tol``.
    """
    closed_res = float(np.max(np.abs(exterior_derivative(alpha).g)))
    if closed_res > closed_tol:
        raise NotClosedError(closed_res, closed_tol)
    px, py = float(np.mean(alpha.a)), float(np.mean(alpha.b))
    nx, ny = alpha.a.shape
    kx = TWO_PI * np.fft.fftfreq(nx, 1.0 / nx)
    if nx % 2 == 0:
        kx[nx // 2] = 0.0
    ky = _wavenumbers(ny, nyquist=False)
    KX, KY = kx[:, None], ky[None, :]
    k2 = KX ** 2 + KY ** 2
    A, B = np.fft.rfft2(alpha.a), np.fft.rfft2(alpha.b)
    with np.errstate(divide="ignore", invalid="ignore"):
        H = np.where(k2 > 0, -1j * (KX * A + KY * B) / k2, 0.0)
    h = np.fft.irfft2(H, s=(nx, ny))
    dh = exterior_derivative(h)
    resid = max(np.max(np.abs(dh.a + px - alpha.a)), np.max(np.abs(dh.b + py - alpha.b)))
    return HodgeSplit(h, (px, py), float(resid), closed_res)


def poisson_solve(g: np.ndarray, mean_tol: float = 1e-10) -> np.ndarray:
    """Mean-zero u with (flat, periodic) Laplacian u = g."""
    g = np.asarray(g, dtype=float)
    m = float(np.mean(g))
    if abs(m) > mean_tol:
        raise NonZeroMeanError(f"right-hand side has mean {m:.3e}")
    nx, ny = g.shape
    kx = TWO_PI * np.fft.fftfreq(nx, 1.0 / nx)
    ky = _wavenumbers(ny, nyquist=True)
    sym = -(kx[:, None] ** 2 + ky[None, :] ** 2)
    G = np.fft.rfft2(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.where(sym != 0, G / sym, 0.0)
    return np.fft.irfft2(U, s=(nx, ny))


# -- sigma-Hamiltonian fields ------------------------------------------------

def surface_hamiltonian_field(psi: np.ndarray, sigma: AreaForm) -> SurfaceField:
    """X_psi with iota_X sigma = -d psi, i.e. X = (-psi_y, psi_x) / rho."""
    dpsi = exterior_derivative(psi)
    rho = sigma.density
    return SurfaceField(-dpsi.b / rho, dpsi.a / rho)


def contract_area(X: SurfaceField, sigma: AreaForm) -> OneForm:
    """iota_X sigma = rho (X^1 dy - X^2 dx)."""
    rho = sigma.density
    return OneForm(-rho * X.x2, rho * X.x1)


def lie_derivative_residual(X: SurfaceField, sigma: AreaForm) -> float:
    """sup |d iota_X sigma|; zero iff X preserves sigma."""
    return float(np.max(np.abs(exterior_derivative(contract_area(X, sigma)).g)))


def poisson_bracket(psi1: np.ndarray, psi2: np.ndarray, sigma: AreaForm) -> np.ndarray:
    """{psi1, psi2} = d psi1 (X_psi2) = (psi1_y psi2_x - psi1_x psi2_y) / rho.

    With this sign {cos(2 pi x), cos(2 pi y)} / (2 pi)^2 = -sin(2 pi x) sin(2 pi y).
    """
    d1, d2 = exterior_derivative(psi1), exterior_derivative(psi2)
    return (d1.b * d2.a - d1.a * d2.b) / sigma.density


# -- off-grid evaluation -----------------------------------------------------

class Interpolant:
    """Periodic evaluation of a grid field at arbitrary torus points.

    ``mode="spline"`` is periodic bicubic (cubic B-spline) interpolation;
    ``mode="fourier"`` sums the trigonometric interpolant directly (Nyquist
    modes dropped).  Trailing component axes are supported.
    """

    def __init__(self, field: np.ndarray, mode: str = "spline"):
        field = np.asarray(field, dtype=float)
        self.nx, self.ny = field.shape[:2]
        self.ncomp = field.shape[2:]
        flat = field.reshape(self.nx, self.ny, -1)
        self.mode = mode
        if mode == "spline":
            self._coef = [ndimage.spline_filter(flat[..., c], order=3, mode="grid-wrap")
                          for c in range(flat.shape[-1])]
        elif mode == "fourier":
            spec = np.fft.fft2(flat, axes=(0, 1)) / (self.nx * self.ny)
            if self.nx % 2 == 0:
                spec[self.nx // 2, :, :] = 0.0
            if self.ny % 2 == 0:
                spec[:, self.ny // 2, :] = 0.0
            self._spec = spec
            self._kx = np.fft.fftfreq(self.nx, 1.0 / self.nx)
            self._ky = np.fft.fftfreq(self.ny, 1.0 / self.ny)
        else:
            raise ValueError(f"unknown interpolation mode {mode!r}")

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        lead = points.shape[:-1]
        p = points.reshape(-1, 2)
        if self.mode == "spline":
            coords = np.stack([p[:, 0] * self.nx, p[:, 1] * self.ny])
            vals = np.stack([ndimage.map_coordinates(c, coords, order=3, mode="grid-wrap",
                                                     prefilter=False) for c in self._coef], -1)
        else:
            px, py = np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1])
            ex = np.exp((2j * np.pi) * px[:, None] * self._kx[None, :])
            ey = np.exp((2j * np.pi) * py[:, None] * self._ky[None, :])
            nc = self._spec.shape[-1]
            tmp = (ex @ self._spec.reshape(self.nx, -1)).reshape(-1, self.ny, nc)
            vals = np.einsum("plc,pl->pc", tmp, ey).real
        return vals.reshape(lead + self.ncomp)


# -- grid diffeomorphisms ----------------------------------------------------

@dataclass(frozen=True)
class GridDiffeo:
    """phi(p) = p + displacement(p), displacement periodic, shape (N_x, N_y, 2).

    Only maps isotopic to the identity are represented.
    """

    displacement: np.ndarray

    @classmethod
    def identity(cls, grid: TorusGrid) -> "GridDiffeo":
        return cls(np.zeros(grid.shape + (2,)))

    @classmethod
    def translation(cls, grid: TorusGrid, c) -> "GridDiffeo":
        return cls(np.broadcast_to(np.asarray(c, dtype=float), grid.shape + (2,)).copy())

    @classmethod
    def from_function(cls, grid: TorusGrid, fn: Callable) -> "GridDiffeo":
        """``fn(x, y) -> (u, v)`` lift of a degree-one map."""
        x, y = grid.coords()
        u, v = fn(x, y)
        return cls(np.stack([np.asarray(u) - x, np.asarray(v) - y], axis=-1))

    @property
    def grid(self) -> TorusGrid:
        return TorusGrid.of(self.displacement)

    def lift(self) -> np.ndarray:
        return self.grid.points() + self.displacement

    def jacobian(self) -> np.ndarray:
        """Dphi as (N_x, N_y, 2, 2), columns = d/dx, d/dy."""
        dx = partial(self.displacement, 0)
        dy = partial(self.displacement, 1)
        return np.stack([dx, dy], axis=-1) + np.eye(2)

    def jacobian_det(self) -> np.ndarray:
        return np.linalg.det(self.jacobian())

    def check_orientation(self):
        det = self.jacobian_det()
        if not np.all(det > 0):
            raise FoldingError(f"Jacobian determinant reaches {det.min():.3e}; refine the step")

    def pullback_area(self, sigma: AreaForm, mode: str = "spline") -> AreaForm:
        """phi^* sigma: density rho(phi(p)) * det Dphi(p)."""
        rho_phi = Interpolant(sigma.density, mode)(self.lift())
        return AreaForm(rho_phi * self.jacobian_det())


def _as_velocity(X, mode):
    if isinstance(X, SurfaceField):
        interp = Interpolant(X.stacked(), mode)
        return lambda t, p: interp(p)

    def vel(t, p):
        return Interpolant(X(t).stacked(), mode)(p)
    return vel


def integrate_points(vel: Callable, p0: np.ndarray, T: float, steps: int) -> np.ndarray:
    """Classical RK4 for p' = vel(t, p) on an array of points."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    p = np.array(p0, dtype=float)
    dt = T / steps
    t = 0.0
    for _ in range(steps):
        k1 = vel(t, p)
        k2 = vel(t + dt / 2, p + dt / 2 * k1)
        k3 = vel(t + dt / 2, p + dt / 2 * k2)
        k4 = vel(t + dt, p + dt * k3)
        p = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return p


def flow_diffeo(X, T: float, steps: int, mode: str = "spline", check: bool = True) -> GridDiffeo:
    """Time-T RK4 flow of every grid point under ``X``.

    ``X`` is a :class:`SurfaceField` or a callable ``t -> SurfaceField``
    (time-dependent family).  Off-grid values come from :class:`Interpolant`.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if isinstance(X, SurfaceField):
        grid = TorusGrid.of(X.x1)
    else:
        grid = TorusGrid.of(X(0.0).x1)
    p0 = grid.points()
    p = integrate_points(_as_velocity(X, mode), p0, T, steps)
    phi = GridDiffeo(p - p0)
    if check:
        phi.check_orientation()
    return phi


# -- serialization -----------------------------------------------------------

_KINDS = {
    "scalar": ("h",),
    "one_form": ("a", "b"),
    "two_form": ("g",),
    "surface_field": ("x1", "x2"),
    "area_form": ("rho",),
}


def _components_of(field):
    if isinstance(field, OneForm):
        return "one_form", [field.a, field.b]
    if isinstance(field, TwoForm):
        return "two_form", [field.g]
    if isinstance(field, SurfaceField):
        return "surface_field", [field.x1, field.x2]
    if isinstance(field, AreaForm):
        return "area_form", [field.density]
    return "scalar", [np.asarray(field, dtype=float)]


def save_field(path, field) -> Path:
    """Write ``<path>.json`` sidecar and row-major little-endian float64 payload.

    Components are stored one after another, each as an N_x-by-N_y block.
    Returns the sidecar path.
    """
    path = Path(path)
    sidecar = path.with_suffix(".json")
    payload = path.with_suffix(".bin")
    kind, comps = _components_of(field)
    nx, ny = comps[0].shape
    data = np.stack(comps).astype("<f8")
    payload.write_bytes(data.tobytes(order="C"))
    header = {"kind": kind, "N_x": nx, "N_y": ny, "components": list(_KINDS[kind]),
              "payload": payload.name}
    sidecar.write_text(json.dumps(header, indent=2))
    return sidecar


def load_field(path):
    sidecar = Path(path).with_suffix(".json")
    header = json.loads(sidecar.read_text())
    kind = header["kind"]
    if kind not in _KINDS:
        raise ValueError(f"unknown field kind {kind!r}")
    nx, ny = int(header["N_x"]), int(header["N_y"])
    ncomp = len(header["components"])
    raw = np.frombuffer((sidecar.parent / header["payload"]).read_bytes(), dtype="<f8")
    if raw.size != ncomp * nx * ny:
        raise ValueError("payload size does not match header")
    comps = raw.reshape(ncomp, nx, ny).astype(float)
    if kind == "one_form":
        return OneForm(comps[0], comps[1])
    if kind == "two_form":
        return TwoForm(comps[0])
    if kind == "surface_field":
        return SurfaceField(comps[0], comps[1])
    if kind == "area_form":
        return AreaForm(comps[0])
    return comps[0]

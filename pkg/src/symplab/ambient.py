"""Flat symplectic tori (T^{2n}, omega) with exact Fourier perturbations.

Matrix convention used everywhere in the package::

    omega(u, v) = u^T @ omega(q) @ v,     iota_V omega = dH  <=>  omega(q)^T V = grad H(q).

Points ``q`` are arrays whose last axis has length ``2n``; every evaluator
broadcasts over the leading axes so that whole grids can be pushed through at
once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFormError, NotUnimodularError

TWO_PI = 2.0 * np.pi
DET_TOL = 1e-8


def standard_form(n: int) -> np.ndarray:
    """Block-diagonal Omega_0 with Omega_0[2i, 2i+1] = 1."""
    omega = np.zeros((2 * n, 2 * n))
    for i in range(n):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


@dataclass(frozen=True)
class TrigTerm:
    """One real Fourier mode ``amplitude * trig(2 pi <frequency, q>)``.

    ``kind`` is ``"sin"`` or ``"cos"``.  For 1-forms ``component`` selects the
    covector index the mode contributes to; scalars ignore it.
    """

    frequency: tuple[int, ...]
    amplitude: float
    kind: str = "cos"
    component: int = 0

    def __post_init__(self):
        if self.kind not in ("sin", "cos"):
            raise ValueError(f"kind must be 'sin' or 'cos', got {self.kind!r}")
        object.__setattr__(self, "frequency", tuple(int(k) for k in self.frequency))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "component", int(self.component))

    def to_dict(self) -> dict:
        return {"component": self.component, "frequency": list(self.frequency),
                "amplitude": self.amplitude, "kind": self.kind}


class _TermTable:
    """Vectorised evaluation of a list of trig terms and their derivatives."""

    def __init__(self, terms: Sequence[TrigTerm], dim: int):
        self.dim = dim
        if terms:
            self.freqs = np.array([t.frequency for t in terms], dtype=float)
            if self.freqs.shape[1] != dim:
                raise ValueError(f"frequency vectors must have length {dim}")
        else:
            self.freqs = np.zeros((0, dim))
        self.amps = np.array([t.amplitude for t in terms], dtype=float)
        self.is_sin = np.array([t.kind == "sin" for t in terms], dtype=bool)
        self.comps = np.array([t.component for t in terms], dtype=int)

    def _phase(self, q):
        return TWO_PI * np.asarray(q, dtype=float) @ self.freqs.T

    def derivative_weights(self, q, order: int):
        """Amplitude times the ``order``-th derivative of sin/cos at each term."""
        ph = self._phase(q)
        s, c = np.sin(ph), np.cos(ph)
        # d^k sin = sin(x + k pi/2), d^k cos = cos(x + k pi/2)
        table = {0: (s, c), 1: (c, -s), 2: (-s, -c), 3: (-c, s)}
        ds, dc = table[order]
        return self.amps * np.where(self.is_sin, ds, dc)


@dataclass(frozen=True)
class ScalarHamiltonian:
    """Real trigonometric polynomial H on T^{2n} with analytic derivatives."""

    dim: int
    terms: tuple[TrigTerm, ...] = ()

    @cached_property
    def _table(self):
        return _TermTable(self.terms, self.dim)

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable) -> "ScalarHamiltonian":
        out = []
        for t in terms:
            out.append(t if isinstance(t, TrigTerm) else TrigTerm(**t))
        return cls(dim, tuple(out))

    def value(self, q):
        return self._table.derivative_weights(q, 0).sum(axis=-1)

    def gradient(self, q):
        t = self._table
        return (t.derivative_weights(q, 1) @ (TWO_PI * t.freqs))

    def hessian(self, q):
        t = self._table
        w = t.derivative_weights(q, 2)
        k = TWO_PI * t.freqs
        return np.einsum("...m,ma,mb->...ab", w, k, k)

    def __call__(self, q):
        return self.value(q)


@dataclass(frozen=True)
class AmbientModel:
    """(T^{2n}, omega) with omega(q) = base_form + d eta(q).

    ``eta`` is a tuple of :class:`TrigTerm` whose ``component`` field is the
    (0-based) covector index.  Closedness of omega holds by construction.
    """

    half_dim: int
    base_form: np.ndarray = field(repr=False)
    eta: tuple[TrigTerm, ...] = ()

    def __post_init__(self):
        omega = np.array(self.base_form, dtype=float)
        d = 2 * self.half_dim
        if omega.shape != (d, d):
            raise ValueError(f"base form must be {d}x{d}, got {omega.shape}")
        if np.max(np.abs(omega + omega.T)) > 1e-14:
            raise ValueError("base form is not antisymmetric")
        if abs(np.linalg.det(omega)) <= DET_TOL:
            raise DegenerateFormError("base form is singular")
        omega.setflags(write=False)
        object.__setattr__(self, "base_form", omega)
        eta = tuple(t if isinstance(t, TrigTerm) else TrigTerm(**t) for t in self.eta)
        for t in eta:
            if not 0 <= t.component < d:
                raise ValueError(f"eta component {t.component} out of range")
        object.__setattr__(self, "eta", eta)

    @classmethod
    def standard(cls, n: int = 2, eta: Iterable = ()) -> "AmbientModel":
        return cls(n, standard_form(n), tuple(eta))

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    @property
    def is_constant(self) -> bool:
        return not self.eta

    def constant_part(self) -> "AmbientModel":
        return AmbientModel(self.half_dim, self.base_form)

    @cached_property
    def _table(self):
        return _TermTable(self.eta, self.dim)

    @cached_property
    def _onehot(self):
        return np.eye(self.dim)[self._table.comps]

    def _grad_eta(self, q):
        """G[..., a, b] = d_a eta_b."""
        t = self._table
        w = t.derivative_weights(q, 1)
        return np.einsum("...m,ma,mb->...ab", w, TWO_PI * t.freqs, self._onehot)

    def omega(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        shape = q.shape[:-1] + (self.dim, self.dim)
        if self.is_constant:
            return np.broadcast_to(self.base_form, shape)
        g = self._grad_eta(q)
        return self.base_form + (g - np.swapaxes(g, -1, -2))

    def omega_derivative(self, q) -> np.ndarray:
        """D[..., c, a, b] = d_c omega_ab."""
        q = np.asarray(q, dtype=float)
        t = self._table
        if self.is_constant:
            return np.zeros(q.shape[:-1] + (self.dim,) * 3)
        w = t.derivative_weights(q, 2)
        k = TWO_PI * t.freqs
        k2 = np.einsum("...m,mc,ma,mb->...cab", w, k, k, self._onehot)
        return k2 - np.swapaxes(k2, -1, -2)

    def pair(self, q, u, v) -> np.ndarray:
        """omega_q(u, v) pointwise."""
        return np.einsum("...a,...ab,...b->...", u, self.omega(q), v)

    def to_dict(self) -> dict:
        return {"n": self.half_dim, "omega": self.base_form.ravel().tolist(),
                "eta": [t.to_dict() for t in self.eta]}


def omega_at(model: AmbientModel, q) -> np.ndarray:
    return model.omega(q)


def _check_nondegenerate(omega):
    det = np.linalg.det(omega)
    if np.any(np.abs(det) <= DET_TOL):
        raise DegenerateFormError(f"omega degenerate: min |det| = {np.min(np.abs(det)):.3e}")


def hamiltonian_vector(model: AmbientModel, H: ScalarHamiltonian, q) -> np.ndarray:
    """Solve omega(q)^T V = grad H(q), i.e. iota_V omega = dH."""
    q = np.asarray(q, dtype=float)
    omega = model.omega(q)
    _check_nondegenerate(omega)
    g = H.gradient(q)
    if model.is_constant:
        flat = g.reshape(-1, model.dim)
        return np.linalg.solve(model.base_form.T, flat.T).T.reshape(g.shape)
    return np.linalg.solve(np.swapaxes(omega, -1, -2), g[..., None])[..., 0]


def hamiltonian_jacobian(model: AmbientModel, H: ScalarHamiltonian, q) -> np.ndarray:
    """Matrix M(q) with d(V_H)(q)[delta] = M(q) @ delta.

    Differentiating omega^T V = grad H gives
    omega^T dV = Hess H delta - (d_delta omega)^T V.
    """
    q = np.asarray(q, dtype=float)
    omega = model.omega(q)
    V = hamiltonian_vector(model, H, q)
    rhs = H.hessian(q)
    if not model.is_constant:
        dom = model.omega_derivative(q)
        rhs = rhs - np.einsum("...cab,...a->...bc", dom, V)
    return np.linalg.solve(np.swapaxes(omega, -1, -2), rhs)


def _rk4(f, y, T, steps):
    dt = T / steps
    t = 0.0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + dt / 2, y + dt / 2 * k1)
        k3 = f(t + dt / 2, y + dt / 2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return y


def ham_flow(model: AmbientModel, H: ScalarHamiltonian, q0, T: float, steps: int,
             wrap: bool = True) -> np.ndarray:
    """Fixed-step RK4 flow of V_H; the result is reduced mod 1 unless ``wrap=False``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    q = _rk4(lambda t, y: hamiltonian_vector(model, H, y), np.asarray(q0, dtype=float), T, steps)
    return np.mod(q, 1.0) if wrap else q


def ham_flow_tangent(model: AmbientModel, H: ScalarHamiltonian, q0, T: float, steps: int):
    """Unwrapped flow together with its differential (fundamental matrix).

    Integrates q' = V_H(q), Phi' = M(q) Phi with Phi(0) = I using the same RK4
    stages, so ``Phi @ v`` is the push-forward of a tangent vector ``v``.
    """
    q0 = np.asarray(q0, dtype=float)
    d = q0.shape[-1]
    phi0 = np.broadcast_to(np.eye(d), q0.shape[:-1] + (d, d)).copy()
    y0 = np.concatenate([q0[..., None], phi0], axis=-1)

    def rhs(t, y):
        q, phi = y[..., 0], y[..., 1:]
        return np.concatenate([hamiltonian_vector(model, H, q)[..., None],
                               hamiltonian_jacobian(model, H, q) @ phi], axis=-1)

    y = _rk4(rhs, y0, T, steps)
    return y[..., 0], y[..., 1:]


def compatible_J_at(model: AmbientModel, q) -> np.ndarray:
    """Orthogonal polar factor of -omega(q) (identity metric).

    The factor U of A = U P satisfies omega U = P > 0, so U is omega-tame and,
    since P commutes with omega, omega-compatible.
    """
    q = np.asarray(q, dtype=float)
    if model.is_constant:
        J = _polar_unitary(-model.base_form)
        return np.broadcast_to(J, q.shape[:-1] + J.shape)
    omega = model.omega(q)
    _check_nondegenerate(omega)
    return _polar_unitary(-omega)


def _polar_unitary(a):
    u, _, vt = np.linalg.svd(a)
    return u @ vt


@dataclass(frozen=True)
class AmbientSymplectomorphism:
    """Affine torus map q -> A q + c (mod 1) with A in GL(2n, Z)."""

    matrix: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)
    base_form: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = np.asarray(self.matrix)
        if not np.allclose(A, np.round(A)):
            raise NotUnimodularError("matrix entries must be integers")
        A = np.round(A).astype(int)
        if abs(round(np.linalg.det(A))) != 1:
            raise NotUnimodularError(f"|det A| = {abs(np.linalg.det(A)):.3g} != 1")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "shift", np.asarray(self.shift, dtype=float))
        object.__setattr__(self, "base_form", np.asarray(self.base_form, dtype=float))

    @classmethod
    def for_model(cls, model: AmbientModel, matrix, shift=None):
        shift = np.zeros(model.dim) if shift is None else shift
        return cls(matrix, shift, model.base_form)

    @cached_property
    def is_symplectic(self) -> bool:
        A = self.matrix
        return bool(np.max(np.abs(A.T @ self.base_form @ A - self.base_form)) <= 1e-12)

    @cached_property
    def is_holomorphic(self) -> bool:
        J = _polar_unitary(-self.base_form)
        return bool(np.max(np.abs(self.matrix @ J - J @ self.matrix)) <= 1e-12)

    def apply_lift(self, q):
        return np.asarray(q, dtype=float) @ self.matrix.T + self.shift


def apply_symplectomorphism(phi: AmbientSymplectomorphism, q) -> np.ndarray:
    return np.mod(phi.apply_lift(q), 1.0)

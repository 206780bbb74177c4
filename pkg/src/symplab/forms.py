"""Pairings of tangent fields along an embedding, J-tilde and CR residuals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ambient import AmbientModel, compatible_J_at
from .embedding import Embedding, alpha
from .surface import AreaForm, TwoForm, integrate, partial


@dataclass(frozen=True)
class PairingResult:
    value: float
    integrand: TwoForm = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, **self.metadata}


def _pair(f: Embedding, v1, v2) -> np.ndarray:
    return f.pair(np.asarray(v1, float), np.asarray(v2, float))


def omega_D(f: Embedding, v1, v2, sigma: AreaForm) -> PairingResult:
    """int omega_{f(x)}(v1, v2) sigma."""
    g = TwoForm(_pair(f, v1, v2) * sigma.density)
    return PairingResult(integrate(g), g, {"pairing": "omega_D"})


def omega_S(f: Embedding, v1, v2, sigma: Optional[AreaForm] = None) -> PairingResult:
    """Pointwise push-forward pairing.

    Integrand ``2 omega(v1, v2) s - 2 (a1 b2 - b1 a2)`` where (a_i, b_i) are the
    components of alpha_{v_i} and s is the pullback density (or ``sigma`` when
    the embedding is known to satisfy f^*omega = sigma).  The sign of the
    second term is the one obtained by contracting omega^omega with two
    sections and the two surface tangents.
    """
    s = f.pullback.g if sigma is None else sigma.density
    a1, a2 = alpha(f, v1), alpha(f, v2)
    g = TwoForm(2.0 * _pair(f, v1, v2) * s - 2.0 * (a1.a * a2.b - a1.b * a2.a))
    return PairingResult(integrate(g), g, {"pairing": "omega_S"})


def jtilde(f: Embedding, v, model: Optional[AmbientModel] = None) -> np.ndarray:
    """(J~ v)(p) = J(f(p)) v(p) with the compatible J of ``model`` (default f.model)."""
    model = f.model if model is None else model
    J = compatible_J_at(model, f.lift)
    return np.einsum("...ab,...b->...a", J, np.asarray(v, float))


def _omega_D_at(model: AmbientModel, lift, v1, v2, rho) -> float:
    om = model.omega(lift)
    return float(np.mean(np.einsum("...a,...ab,...b->...", v1, om, v2) * rho))


def d_omega_D_fd(f: Embedding, V1, V2, V3, h: float, sigma: AreaForm) -> float:
    """|sum_cyc d_{V_i} omega^D(V_j, V_k)| by central differences along f +- h V_i.

    The V_i are extended as constant fields in the global chart, so bracket
    terms drop out and the sum approximates d(omega^D)(V1, V2, V3) = 0 with
    an O(h^2) error.
    """
    if not 1e-6 <= h <= 1e-1:
        raise ValueError("step h must lie in [1e-6, 1e-1]")
    V = [np.asarray(x, float) for x in (V1, V2, V3)]
    rho = sigma.density
    total = 0.0
    for i in range(3):
        vi, vj, vk = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
        plus = _omega_D_at(f.model, f.lift + h * vi, vj, vk, rho)
        minus = _omega_D_at(f.model, f.lift - h * vi, vj, vk, rho)
        total += (plus - minus) / (2 * h)
    return abs(total)


def cr_residual(f: Embedding, model: Optional[AmbientModel] = None) -> np.ndarray:
    """|dF/dy - J(f) dF/dx| pointwise (convention j d/dx = d/dy)."""
    model = f.model if model is None else model
    J = compatible_J_at(model, f.lift)
    r = f.fy - np.einsum("...ab,...b->...a", J, f.fx)
    return np.linalg.norm(r, axis=-1)


def _constant_J(J) -> np.ndarray:
    if isinstance(J, AmbientModel):
        if not J.is_constant:
            raise ValueError("variation residual needs a constant complex structure")
        return np.asarray(compatible_J_at(J, np.zeros(J.dim)))
    J = np.asarray(J, float)
    if J.ndim != 2:
        raise ValueError("variation residual needs a constant complex structure")
    return J


def cr_variation_residual(f: Embedding, v, J) -> np.ndarray:
    """|dv/dy - J dv/dx| pointwise for a constant J (matrix or constant model)."""
    J = _constant_J(J)
    v = np.asarray(v, float)
    if v.shape != f.lift.shape:
        raise ValueError("field shape does not match the embedding grid")
    r = partial(v, 1) - partial(v, 0) @ J.T
    return np.linalg.norm(r, axis=-1)

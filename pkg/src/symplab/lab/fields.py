"""Seeded random band-limited fields for the suites."""
from __future__ import annotations

import zlib

import numpy as np

from ..ambient import ScalarHamiltonian, TrigTerm
from ..embedding import (Embedding, hamiltonian_restriction, split_tangent, tangential_lift)
from ..surface import AreaForm, SurfaceField, TorusGrid, surface_hamiltonian_field


def suite_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream per (seed, suite) so suites can run in any order."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


class FieldGenerator:
    def __init__(self, rng: np.random.Generator, bandwidth: int = 2, amplitude: float = 0.1):
        self.rng = rng
        self.bandwidth = int(bandwidth)
        self.amplitude = float(amplitude)

    def scalar(self, grid: TorusGrid, amplitude=None) -> np.ndarray:
        """Mean-zero trigonometric polynomial, |k|_inf <= bandwidth, sup = amplitude."""
        amp = self.amplitude if amplitude is None else amplitude
        B = self.bandwidth
        x, y = grid.coords()
        out = np.zeros(grid.shape)
        for kx in range(0, B + 1):
            for ky in range(-B, B + 1):
                if kx == 0 and ky <= 0:
                    continue
                ph = 2 * np.pi * (kx * x + ky * y)
                c, s = self.rng.normal(size=2)
                out += c * np.cos(ph) + s * np.sin(ph)
        return amp * out / np.max(np.abs(out))

    def vector(self, grid: TorusGrid, dim: int, amplitude=None) -> np.ndarray:
        """Tangent field: band-limited components plus a random constant."""
        amp = self.amplitude if amplitude is None else amplitude
        comps = [self.scalar(grid, amp) + amp * self.rng.normal() for _ in range(dim)]
        return np.stack(comps, axis=-1)

    def surface_field(self, grid: TorusGrid, amplitude=None) -> SurfaceField:
        amp = self.amplitude if amplitude is None else amplitude
        return SurfaceField(self.scalar(grid, amp) + amp * self.rng.normal(),
                            self.scalar(grid, amp) + amp * self.rng.normal())

    def hamiltonian(self, dim: int, modes: int = 4, amplitude=None) -> ScalarHamiltonian:
        """Random H with frequency vectors in {-1, 0, 1}^dim; |grad H| ~ amplitude."""
        amp = self.amplitude if amplitude is None else amplitude
        terms = []
        for _ in range(modes):
            k = np.zeros(dim, dtype=int)
            while not k.any():
                k = self.rng.integers(-1, 2, size=dim)
            kind = "sin" if self.rng.random() < 0.5 else "cos"
            terms.append(TrigTerm(tuple(k), amp * self.rng.normal() / (2 * np.pi), kind))
        return ScalarHamiltonian(dim, tuple(terms))

    # -- tangent fields of prescribed type ---------------------------------------

    def exact_field(self, f: Embedding):
        """Hamiltonian restriction i^*V_H (an exact direction) with its H."""
        H = self.hamiltonian(f.model.dim)
        return hamiltonian_restriction(f, H), H

    def sigma_hamiltonian(self, f: Embedding, sigma: AreaForm, amplitude=None):
        """df(X_psi) for random psi; returns (field, psi)."""
        psi = self.scalar(f.grid, amplitude)
        return tangential_lift(f, surface_hamiltonian_field(psi, sigma)), psi

    def orthogonal_field(self, f: Embedding) -> np.ndarray:
        return split_tangent(f, self.vector(f.grid, f.model.dim)).orthogonal

    def closed_field(self, f: Embedding) -> np.ndarray:
        """Random v with alpha_v closed.

        Sum of an exact direction, a tangential field preserving the pullback
        area, a tangential harmonic part (alpha constant) and an orthogonal part.
        """
        s = f.pullback.g
        u, _ = self.exact_field(f)
        w, _ = self.sigma_hamiltonian(f, AreaForm(s))
        c = self.amplitude * self.rng.normal(size=2)
        harmonic = tangential_lift(f, SurfaceField(c[0] / s, c[1] / s))
        return u + w + harmonic + self.orthogonal_field(f)

"""Scenario files: a flat JSON description of model, grid, area form and checks."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from ..ambient import AmbientModel, TrigTerm
from ..embedding import (Embedding, flat_torus, graph_torus, linear_torus, load_embedding,
                         sheared_torus, standard_winding)
from ..errors import ScenarioError
from ..surface import AreaForm, TorusGrid, load_field

SCHEMA_VERSION = 1

SUITES = ("vanish", "probe_converse", "exact_coincidence", "tangency", "compat",
          "invariance", "reduction", "holomorphic", "closedness", "moser")

DEFAULT_TOLERANCES = {
    "fixture": 1e-10,          # analytic fixture values
    "factor_two": 1e-8,        # relative to 1 + |omega_D|
    "pointwise": 1e-10,        # pointwise integrands and orthogonality
    "closed": 1e-8,            # |d alpha| for closed verdicts and d(iota_X sigma)
    "exact": 1e-8,             # periods for exact verdicts
    "potential": 1e-8,
    "horizontal": 1e-8,
    "reduction": 1e-8,
    "bracket": 1e-10,
    "reconstruct": 1e-14,
    "compat": 1e-8,
    "closedness_constant": 1e-12,
    "closedness_ratio": [3.5, 4.5],
    "sympl_invariance": 1e-6,
    "reparam_pullback": 1e-4,
    "ham_constant": 10.0,      # C in C * steps^-4 + C' * N^-2
    "ham_spatial": 1e-6,       # C'
    "ham_order": [3.5, 4.5],
    "area_break": 1e-3,        # minimum residual for non-area-preserving maps
    "holomorphic": 1e-10,
    "cr": 1e-12,
    "moser": 1e-4,
    "moser_oracle": 1e-4,
    "moser_idempotence": 1e-6,
}


def _check_keys(d: dict, allowed, where: str):
    if not isinstance(d, dict):
        raise ScenarioError(f"{where} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ScenarioError(f"unknown keys in {where}: {sorted(extra)}")


@dataclass(frozen=True)
class FieldSpec:
    bandwidth: int = 2
    amplitude: float = 0.1
    samples: int = 50


@dataclass(frozen=True)
class FlowSpec:
    steps: int = 200
    interp: str = "fourier"
    amplitude: float = 0.005
    ham_steps: int = 8
    ham_amplitude: float = 0.2


@dataclass(frozen=True)
class MoserSpec:
    steps: int = 50
    interp: str = "spline"
    a: float = 0.3
    N: int = 64


def _sub(cls, raw, where):
    if raw is None:
        return cls()
    _check_keys(raw, [f.name for f in fields(cls)], where)
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ScenarioError(f"bad {where}: {exc}") from exc


@dataclass(frozen=True)
class Scenario:
    n: int = 2
    omega: Union[str, tuple] = "standard"
    eta: tuple = ()
    Nx: int = 64
    Ny: int = 64
    rho: Any = 1.0
    embedding: Any = "flat"
    fields: FieldSpec = field(default_factory=FieldSpec)
    flow: FlowSpec = field(default_factory=FlowSpec)
    moser: MoserSpec = field(default_factory=MoserSpec)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    suites: tuple = SUITES
    seed: int = 0
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ScenarioError("n must be >= 2")
        if min(self.Nx, self.Ny) < 8:
            raise ScenarioError("grid sizes must be >= 8")
        if not self.fields.bandwidth < min(self.Nx, self.Ny) / 4:
            raise ScenarioError(f"bandwidth {self.fields.bandwidth} must be < N/4 "
                                f"= {min(self.Nx, self.Ny) / 4:g}")
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise ScenarioError(f"unknown suites: {sorted(unknown)}")
        for interp in (self.flow.interp, self.moser.interp):
            if interp not in ("spline", "fourier"):
                raise ScenarioError(f"unknown interpolation {interp!r}")

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"version": SCHEMA_VERSION, "n": self.n,
             "omega": self.omega if isinstance(self.omega, str) else [list(r) for r in self.omega],
             "eta": [dict(t) for t in self.eta], "Nx": self.Nx, "Ny": self.Ny,
             "rho": self.rho, "embedding": self.embedding,
             "fields": vars(self.fields).copy(), "flow": vars(self.flow).copy(),
             "moser": vars(self.moser).copy(), "tolerances": dict(self.tolerances),
             "suites": list(self.suites), "seed": self.seed}
        return json.loads(json.dumps(d))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=int(seed))

    def with_tolerance(self, value: float) -> "Scenario":
        return replace(self, tolerances=_merge_tolerances(float(value)))

    # -- realization -------------------------------------------------------------

    def model(self) -> AmbientModel:
        if self.omega == "standard":
            return AmbientModel.standard(self.n, [TrigTerm(**t) for t in self.eta])
        base = np.array(self.omega, dtype=float)
        return AmbientModel(self.n, base, tuple(TrigTerm(**t) for t in self.eta))

    def grid(self) -> TorusGrid:
        return TorusGrid(self.Nx, self.Ny)

    def build_embedding(self, model: Optional[AmbientModel] = None) -> Embedding:
        model = self.model() if model is None else model
        return build_embedding(self.embedding, model, self.grid(), self.base_dir)

    def area_form(self, f: Optional[Embedding] = None) -> AreaForm:
        grid = self.grid()
        if isinstance(self.rho, (int, float)):
            return AreaForm.constant(grid, float(self.rho))
        if self.rho == "pullback":
            f = self.build_embedding() if f is None else f
            return f.area_form()
        if isinstance(self.rho, dict) and set(self.rho) == {"file"}:
            sigma = load_field(self.base_dir / self.rho["file"])
            if not isinstance(sigma, AreaForm) or sigma.density.shape != grid.shape:
                raise ScenarioError("rho file must hold an area form on the scenario grid")
            return sigma
        raise ScenarioError(f"bad rho specification {self.rho!r}")


def _merge_tolerances(raw) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    if raw is None:
        return tol
    if isinstance(raw, (int, float)):
        # scalar override applies to every scalar tolerance; ranges stay put
        return {k: (float(raw) if not isinstance(v, list) else v) for k, v in tol.items()}
    _check_keys(raw, DEFAULT_TOLERANCES, "tolerances")
    for k, v in raw.items():
        if isinstance(DEFAULT_TOLERANCES[k], list):
            if not (isinstance(v, list) and len(v) == 2 and v[0] <= v[1]):
                raise ScenarioError(f"tolerance {k} must be a [lo, hi] range")
            tol[k] = [float(v[0]), float(v[1])]
        else:
            tol[k] = float(v)
    return tol


_TOP_KEYS = {"version", "n", "omega", "eta", "N", "Nx", "Ny", "rho", "embedding", "fields",
             "flow", "moser", "tolerances", "suites", "seed"}
_TERM_KEYS = {"component", "frequency", "amplitude", "kind"}


def scenario_from_dict(raw: dict, base_dir=".") -> Scenario:
    _check_keys(raw, _TOP_KEYS, "scenario")
    if raw.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported scenario version {raw['version']}")
    n = int(raw.get("n", 2))
    if "N" in raw and ("Nx" in raw or "Ny" in raw):
        raise ScenarioError("give either N or Nx/Ny")
    nx = int(raw.get("N", raw.get("Nx", 64)))
    ny = int(raw.get("N", raw.get("Ny", nx)))
    omega = raw.get("omega", "standard")
    if omega != "standard":
        arr = np.array(omega, dtype=float)
        if arr.size != (2 * n) ** 2:
            raise ScenarioError("omega must be 'standard' or a 2n x 2n matrix")
        omega = tuple(tuple(r) for r in arr.reshape(2 * n, 2 * n).tolist())
    eta = []
    for t in raw.get("eta", []):
        _check_keys(t, _TERM_KEYS, "eta term")
        term = TrigTerm(**t)
        if len(term.frequency) != 2 * n or not 0 <= term.component < 2 * n:
            raise ScenarioError("eta term does not match the ambient dimension")
        eta.append(term.to_dict())
    rho = raw.get("rho", 1.0)
    if isinstance(rho, dict) or rho == "pullback":
        pass
    elif isinstance(rho, (int, float)) and not isinstance(rho, bool) and rho > 0:
        rho = float(rho)
    else:
        raise ScenarioError(f"bad rho specification {rho!r}")
    try:
        sc = Scenario(
            n=n, omega=omega, eta=tuple(eta), Nx=nx, Ny=ny, rho=rho,
            embedding=raw.get("embedding", "flat"),
            fields=_sub(FieldSpec, raw.get("fields"), "fields"),
            flow=_sub(FlowSpec, raw.get("flow"), "flow"),
            moser=_sub(MoserSpec, raw.get("moser"), "moser"),
            tolerances=_merge_tolerances(raw.get("tolerances")),
            suites=tuple(raw.get("suites", SUITES)), seed=int(raw.get("seed", 0)),
            base_dir=Path(base_dir))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc
    _validate_embedding_spec(sc.embedding, sc.base_dir)
    if isinstance(sc.rho, dict):
        if set(sc.rho) != {"file"}:
            raise ScenarioError("rho object must be {\"file\": path}")
        if not (sc.base_dir / sc.rho["file"]).with_suffix(".json").exists():
            raise ScenarioError(f"rho file {sc.rho['file']} not found")
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed JSON ({exc})") from exc
    return scenario_from_dict(raw, path.parent)


def dump_scenario(sc: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(sc.to_dict(), indent=2) + "\n")
    return path


# -- embedding specifications ------------------------------------------------

_EMBEDDINGS = {
    "flat": set(),
    "sheared": {"a"},
    "graph": {"terms"},
    "linear": {"winding", "offset"},
}


def _validate_embedding_spec(spec, base_dir):
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict):
        raise ScenarioError("embedding must be a name or an object")
    if "file" in spec:
        _check_keys(spec, {"file"}, "embedding")
        if not (Path(base_dir) / spec["file"]).with_suffix(".json").exists():
            raise ScenarioError(f"embedding file {spec['file']} not found")
        return
    name = spec.get("name")
    if name not in _EMBEDDINGS:
        raise ScenarioError(f"unknown embedding family {name!r}")
    _check_keys(spec, _EMBEDDINGS[name] | {"name"}, f"embedding '{name}'")


def build_embedding(spec, model: AmbientModel, grid: TorusGrid, base_dir=".") -> Embedding:
    if isinstance(spec, str):
        spec = {"name": spec}
    _validate_embedding_spec(spec, base_dir)
    if "file" in spec:
        f = load_embedding(Path(base_dir) / spec["file"], model)
        if f.grid.shape != grid.shape:
            raise ScenarioError("embedding file grid differs from the scenario grid")
        return f
    name = spec["name"]
    if name == "flat":
        return flat_torus(model, grid)
    if name == "sheared":
        return sheared_torus(model, grid, float(spec.get("a", 0.3)))
    if name == "graph":
        x, y = grid.coords()
        normal = np.zeros(grid.shape + (model.dim - 2,))
        for t in spec.get("terms", []):
            _check_keys(t, _TERM_KEYS, "graph term")
            term = TrigTerm(**t)
            if len(term.frequency) != 2 or not 0 <= term.component < model.dim - 2:
                raise ScenarioError("graph terms need 2-d frequencies and a normal component")
            ph = 2 * np.pi * (term.frequency[0] * x + term.frequency[1] * y)
            normal[..., term.component] += term.amplitude * (np.sin(ph) if term.kind == "sin"
                                                              else np.cos(ph))
        return graph_torus(model, grid, normal)
    W = np.array(spec.get("winding", standard_winding(model.dim).tolist()))
    return linear_torus(model, grid, W, spec.get("offset"))

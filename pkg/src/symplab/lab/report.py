"""Check records and suite reports."""
from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class Check(str, Enum):
    """Fixed vocabulary of checked statements; every record cites one."""

    HAM_RESTRICTION_EXACT = "ham_restriction_exact"
    HAM_POTENTIAL = "ham_potential_matches_composition"
    EXACT_PAIRS_TANGENTIAL_TO_ZERO = "exact_pairs_tangential_to_zero"
    CONVERSE_PROBE = "converse_probe"
    FACTOR_TWO_FIXTURE = "factor_two_fixture"
    FACTOR_TWO = "factor_two_exact_directions"
    TANGENTIAL_INTEGRAND_VANISHES = "tangential_integrand_vanishes"
    TANGENTIAL_INTEGRAND_IMMERSION = "tangential_integrand_vanishes_immersion"
    SPLIT_RECONSTRUCTS = "split_reconstructs"
    SPLIT_ORTHOGONAL = "split_orthogonal"
    SPLIT_IDEMPOTENT = "split_idempotent"
    SPLIT_CLOSED_PRESERVES_AREA = "split_closed_field_preserves_area"
    J_SQUARES_TO_MINUS_ONE = "j_squares_to_minus_one"
    TAMED = "pairing_tamed_by_j"
    COMPATIBLE = "pairing_j_invariant"
    SYMPL_INVARIANCE = "surface_symplectomorphism_invariance"
    SYMPL_REPARAM_PULLBACK = "surface_symplectomorphism_keeps_pullback"
    HAM_INVARIANCE = "ambient_hamiltonian_invariance"
    HAM_ORDER = "ambient_hamiltonian_invariance_order"
    NON_AREA_PRESERVING_BREAKS = "non_area_preserving_breaks_pullback"
    REDUCED_PAIRING_WELL_DEFINED = "reduced_pairing_well_defined"
    BRACKET_INTEGRATES_TO_ZERO = "bracket_integrates_to_zero"
    REDUCED_FACTOR_TWO = "reduced_pairing_factor_two"
    CR_HOLOMORPHIC = "holomorphic_cr_residual"
    CR_NOT_HOLOMORPHIC = "non_holomorphic_cr_residual"
    J_PRESERVES_TANGENT = "j_preserves_tangent_plane"
    J_PRESERVES_ORTHOGONAL = "j_preserves_orthogonal_complement"
    J_COMMUTES_WITH_SPLIT = "j_commutes_with_split"
    COMPOSITION_PRESERVES = "holomorphic_symplectic_composition"
    ORTHOGONAL_TAMED = "orthogonal_part_tamed"
    ORTHOGONAL_DOMINATES = "orthogonal_part_bounds_tamed_pairing"
    ORTHOGONAL_TANGENTIAL_J = "orthogonal_pairs_j_tangential_to_zero"
    VARIATION_CLOSED_UNDER_J = "holomorphic_variations_closed_under_j"
    CLOSEDNESS_CONSTANT = "closedness_constant_model"
    CLOSEDNESS_ORDER = "closedness_second_order"
    MOSER_RESIDUAL = "moser_residual"
    MOSER_ORACLE = "moser_matches_oracle"
    MOSER_AREA_MISMATCH = "moser_rejects_area_mismatch"
    MOSER_IDEMPOTENT = "moser_idempotent"
    MOSER_ORIENTATION = "moser_orientation_preserving"
    MOSER_SCENARIO = "moser_scenario_embedding"
    SUITE_ERROR = "suite_error"


def digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=float))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass
class Record:
    """One check.  ``kind`` fixes how residual and tolerance compare:

    ``max``: residual <= tolerance; ``min``: residual > tolerance;
    ``range``: lo <= residual <= hi.  Report-only records have asserted=False.
    """

    check: Check
    residual: float
    tolerance: object
    kind: str = "max"
    inputs: str = ""
    asserted: bool = True
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        r = self.residual
        if not np.isfinite(r):
            return False
        if self.kind == "max":
            return r <= self.tolerance
        if self.kind == "min":
            return r > self.tolerance
        lo, hi = self.tolerance
        return lo <= r <= hi

    def to_dict(self) -> dict:
        return {"check": self.check.value, "inputs": self.inputs, "residual": float(self.residual),
                "tolerance": self.tolerance, "kind": self.kind, "pass": bool(self.passed),
                "asserted": self.asserted, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    records: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records if r.asserted)

    def add(self, *args, **kwargs) -> Record:
        rec = Record(*args, **kwargs)
        self.records.append(rec)
        return rec

    def worst(self, check: Check) -> Record:
        recs = [r for r in self.records if r.check == check]
        return max(recs, key=lambda r: r.residual if r.kind == "max" else -r.residual)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "pass": self.passed,
                "asserted": any(r.asserted for r in self.records),
                "records": [r.to_dict() for r in self.records], "notes": self.notes}


@dataclass
class Report:
    scenario_digest: str
    seed: int
    grid: tuple
    suites: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> dict:
        import scipy
        return {"version": 1, "pass": self.passed, "scenario_digest": self.scenario_digest,
                "environment": {"seed": self.seed, "grid": list(self.grid),
                                "python": platform.python_version(),
                                "numpy": np.__version__, "scipy": scipy.__version__},
                "suites": [s.to_dict() for s in self.suites]}


def emit_report(report: Report, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")

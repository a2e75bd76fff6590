"""Pydantic models for specification files and machine-readable reports.

Spec parsing is strict: unknown keys are rejected everywhere so a typo cannot
silently reconfigure a mathematical input.  The same models double as the
request/response bodies of the HTTP service, and every boolean verdict in a
report travels with the numeric evidence that produced it.
"""

from __future__ import annotations

from importlib import metadata
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import groupmodel
from .diagnostics import PairSpec
from .errors import SpecError

try:
    VERSION = metadata.version("repfam")
except metadata.PackageNotFoundError:  # running from a source tree
    VERSION = "0.1.0"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# specification file
# ---------------------------------------------------------------------------

class GroupModel(_Strict):
    kind: Literal["positive_reals", "real_line", "circle"]


class SubgroupModel(_Strict):
    kind: Literal["trivial", "finite_list"] = "trivial"
    elements: List[float] = Field(default_factory=list)


class RepresentationModel(_Strict):
    kind: Literal["diagonal_weights", "rotation", "log_unipotent", "direct_sum"]
    weights: Optional[List[float]] = None
    frequencies: Optional[List[float]] = None
    summands: Optional[List["RepresentationModel"]] = None


class CharactersModel(_Strict):
    kind: Literal["power", "linear", "trivial"]


class SamplesModel(_Strict):
    count: int = Field(default=64, ge=1)
    seed: int = 0


class TolerancesModel(_Strict):
    rank_rel: float = Field(default=1e-9, gt=0.0, lt=1.0)
    quad_tol: float = Field(default=1e-10, gt=0.0, lt=1.0)
    residual: float = Field(default=1e-8, gt=0.0, lt=1.0)


class SpecFileModel(_Strict):
    group: GroupModel
    subgroup: SubgroupModel = Field(default_factory=SubgroupModel)
    representation: RepresentationModel
    v0: List[float]
    characters: CharactersModel
    samples: SamplesModel = Field(default_factory=SamplesModel)
    tolerances: TolerancesModel = Field(default_factory=TolerancesModel)


def _build_rep(model: RepresentationModel, chart: groupmodel.GroupChart):
    if model.kind == "diagonal_weights":
        if not model.weights:
            raise SpecError("representation.weights is required for diagonal_weights")
        return groupmodel.diagonal_weights(chart, model.weights)
    if model.kind == "rotation":
        if not model.frequencies:
            raise SpecError("representation.frequencies is required for rotation")
        return groupmodel.rotation(chart, model.frequencies)
    if model.kind == "log_unipotent":
        return groupmodel.log_unipotent(chart)
    if not model.summands:
        raise SpecError("representation.summands is required for direct_sum")
    return groupmodel.direct_sum([_build_rep(part, chart) for part in model.summands])


def build_pair(spec: SpecFileModel) -> PairSpec:
    """Materialize the pair declared by a spec file; every construction-time
    validation failure surfaces as SpecError naming the offending field."""
    chart = groupmodel.chart(spec.group.kind)
    subgroup = groupmodel.SubgroupSpec(kind=spec.subgroup.kind,
                                       elements=tuple(spec.subgroup.elements))
    subgroup.validate_on(chart)
    rep = _build_rep(spec.representation, chart)
    characters = groupmodel.CharacterBasis(kind=spec.characters.kind)
    validation = groupmodel.validate_character_basis(
        characters, chart, subgroup, seed=spec.samples.seed)
    if not validation.valid:
        raise SpecError(
            f"characters ({spec.characters.kind}) rejected: additivity residual "
            f"{validation.max_additivity_residual:.2e} at {validation.offending_pair}, "
            f"subgroup residual {validation.max_subgroup_residual:.2e} at "
            f"{validation.offending_element}")
    return PairSpec(rep=rep, v0=np.asarray(spec.v0, dtype=float), chart=chart,
                    subgroup=subgroup, characters=characters)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

class Provenance(_Strict):
    seed: int
    sample_count: int
    tolerances: TolerancesModel
    version: str = VERSION


class RankEvidence(_Strict):
    rank: int
    dim: int
    singular_values: List[float]
    threshold: float


class BoolWithRank(_Strict):
    value: bool
    evidence: RankEvidence


class WellDefinedReport(_Strict):
    passed: bool
    max_residual: float


class SpanConditionsReport(_Strict):
    cyclic: bool
    dual_fixed_trivial: bool
    dual_fixed_dim: int


class WitnessModel(_Strict):
    covector: List[float]
    char_coeffs: List[float]
    constant: float
    fresh_residual: float


class InjectiveReport(_Strict):
    value: bool
    xi_margin: float
    assumption: str
    evidence: RankEvidence
    witness: Optional[WitnessModel] = None


class CheckReport(_Strict):
    well_defined: WellDefinedReport
    fixed_subspace_dim: int
    cyclic: BoolWithRank
    affine_span: BoolWithRank
    span_conditions: SpanConditionsReport
    injective: InjectiveReport
    provenance: Provenance


class EquivReport(_Strict):
    equivalent: bool
    psi: Optional[List[List[float]]] = None
    residual: Optional[float] = None
    same_family: bool
    status: str
    provenance: Provenance


class MembershipModel(_Strict):
    decision: Literal["inside", "outside", "inconclusive"]
    method: str
    detail: dict


class FamilyReport(_Strict):
    status: Literal["ok", "outside_domain"]
    membership: MembershipModel
    phi: Optional[float] = None
    grid: Optional[List[List[float]]] = None
    samples: Optional[List[float]] = None
    provenance: Provenance


class NormalizerCase(_Strict):
    a: float
    b: float
    lam: float
    case: str
    phi: float
    quadrature_mass: float
    closed_form_mass: float
    rel_error: float
    passed: bool


class EquivalenceCase(_Strict):
    r: float
    s: float
    psi: List[List[float]]
    psi_error: float
    pdf_residual: float
    passed: bool


class InjectivityCase(_Strict):
    injective: bool
    expected: bool
    passed: bool
    assumption: str


class VerifyGigReport(_Strict):
    passed: bool
    normalizer_cases: List[NormalizerCase]
    injectivity: InjectivityCase
    equivalence_cases: List[EquivalenceCase]
    provenance: Provenance

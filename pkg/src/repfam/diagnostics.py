"""Identifiability diagnostics for a representation-with-vector pair.

A pair (rep, v0) generates sufficient statistics x -> rho(x) v0.  Whether the
natural parameters of the resulting family are identifiable comes down to
linear-algebra facts about the orbit of v0, decided here on sampled group
elements:

* cyclicity - the orbit spans the whole space;
* affine span - the orbit is not trapped in a proper affine subspace;
* dual fixed vectors - covectors the whole group leaves fixed;
* the injectivity check itself - no nonzero covector makes the statistic a
  log-character plus a constant.  When that fails, an explicit witness
  (covector, character coefficients, constant) is returned and can be
  replayed against densities.

Sampled quantifiers are justified as in groupmodel: the identities are linear
in finitely many analytic functions of g, so generic samples exceeding that
count settle them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import InsufficientSamplesError, SpecError
from .groupmodel import (
    CharacterBasis,
    GroupChart,
    SubgroupSpec,
    TRIVIAL_CHARACTERS,
    TRIVIAL_SUBGROUP,
    dual_rep_eval,
    rep_eval,
    sample_group,
)
from .numkernel import RankReport, as_vector, nullspace, rank

DEFAULT_SAMPLES = 64
_XI_ZERO_MARGIN = 1e-7


@dataclass(frozen=True)
class PairSpec:
    """A catalog representation together with a subgroup-fixed vector.

    Construction validates that v0 is nonzero and fixed by every declared
    subgroup element; ``PairSpec.unchecked`` skips that, so negative tests
    can exercise ``well_definedness_check`` on broken inputs.
    """

    rep: object
    v0: np.ndarray
    chart: GroupChart
    subgroup: SubgroupSpec = TRIVIAL_SUBGROUP
    characters: CharacterBasis = TRIVIAL_CHARACTERS

    def __post_init__(self):
        v0 = as_vector(self.v0)
        object.__setattr__(self, "v0", v0)
        if v0.size != self.rep.dim:
            raise SpecError(
                f"v0 has {v0.size} entries but the representation has dimension {self.rep.dim}")
        if self.rep.chart.name != self.chart.name:
            raise SpecError("pair chart differs from the representation's chart")
        self.subgroup.validate_on(self.chart)
        if getattr(self, "_skip_validation", False):
            return
        if np.linalg.norm(v0) == 0.0:
            raise SpecError("v0 must be nonzero")
        basis = h_fixed_subspace(self.rep, self.subgroup)
        if basis:
            proj = sum((v0 @ b) * b for b in basis)
            resid = np.linalg.norm(v0 - proj)
        else:
            resid = np.linalg.norm(v0)
        if resid > 1e-10 * max(1.0, np.linalg.norm(v0)):
            raise SpecError(
                f"v0 is not fixed by the subgroup (projection residual {resid:.2e})")

    @classmethod
    def unchecked(cls, rep, v0, chart, subgroup=TRIVIAL_SUBGROUP,
                  characters=TRIVIAL_CHARACTERS) -> "PairSpec":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_skip_validation", True)
        object.__setattr__(obj, "rep", rep)
        object.__setattr__(obj, "v0", as_vector(v0))
        object.__setattr__(obj, "chart", chart)
        object.__setattr__(obj, "subgroup", subgroup)
        object.__setattr__(obj, "characters", characters)
        obj.__post_init__()
        return obj


@dataclass(frozen=True)
class Witness:
    """A redundancy direction: the covector pairs with the moving vector to a
    log-character combination plus a constant, on every sampled element."""

    covector: np.ndarray
    char_coeffs: np.ndarray
    constant: float
    fresh_residual: float


@dataclass(frozen=True)
class InjectivityVerdict:
    injective: bool
    witness: Optional[Witness]
    rank_details: RankReport
    xi_margin: float
    assumption: str


@dataclass(frozen=True)
class WellDefinednessReport:
    passed: bool
    max_residual: float
    offending: Optional[Tuple[float, float]] = None


def h_fixed_subspace(rep, subgroup: SubgroupSpec, rel_tol: float = 1e-9) -> List[np.ndarray]:
    """Orthonormal basis of the subspace fixed by every subgroup element.

    Trivial subgroup fixes everything, so the standard basis comes back.
    """
    if subgroup.kind == "trivial" or not subgroup.elements:
        return [np.eye(rep.dim)[i] for i in range(rep.dim)]
    stacked = np.vstack([rep_eval(rep, h) - np.eye(rep.dim) for h in subgroup.elements])
    return nullspace(stacked, rel_tol)


def _orbit_columns(pair: PairSpec, n_samples: int, seed: int) -> np.ndarray:
    gs = np.array(sample_group(pair.chart, n_samples, seed))
    return pair.rep.orbit_of(pair.v0, gs).T


def cyclic_check(pair: PairSpec, n_samples: int = DEFAULT_SAMPLES,
                 seed: int = 0, rel_tol: float = 1e-9) -> Tuple[bool, RankReport]:
    """True when the sampled orbit of v0 spans the whole space."""
    cols = _orbit_columns(pair, n_samples, seed)
    report = rank(cols, rel_tol)
    return report.rank == pair.rep.dim, report


def dual_fixed_vectors(rep, n_samples: int = DEFAULT_SAMPLES, seed: int = 0,
                       rel_tol: float = 1e-9) -> List[np.ndarray]:
    """Basis of covectors fixed by the contragredient action on all samples."""
    gs = sample_group(rep.chart, n_samples, seed)[1:]
    stacked = np.vstack([dual_rep_eval(rep, g) - np.eye(rep.dim) for g in gs])
    return nullspace(stacked, rel_tol)


def affine_span_check(pair: PairSpec, n_samples: int = DEFAULT_SAMPLES,
                      seed: int = 0, rel_tol: float = 1e-9) -> Tuple[bool, RankReport]:
    """True when the orbit is not contained in any proper affine subspace,
    i.e. the differences rho(g) v0 - v0 span the whole space."""
    cols = _orbit_columns(pair, n_samples, seed) - pair.v0[:, None]
    report = rank(cols, rel_tol)
    return report.rank == pair.rep.dim, report


@dataclass(frozen=True)
class SpanConditions:
    cyclic: bool
    dual_fixed_trivial: bool
    cyclic_rank: RankReport
    dual_fixed_dim: int

    @property
    def both(self) -> bool:
        return self.cyclic and self.dual_fixed_trivial


def span_conditions_check(pair: PairSpec, n_samples: int = DEFAULT_SAMPLES,
                          seed: int = 0, rel_tol: float = 1e-9) -> SpanConditions:
    """Joint report of cyclicity and triviality of the dual fixed space; the
    conjunction is equivalent to the affine-span condition, which the test
    suite cross-checks on a randomized catalog."""
    cyc, rep_rank = cyclic_check(pair, n_samples, seed, rel_tol)
    fixed = dual_fixed_vectors(pair.rep, n_samples, seed, rel_tol)
    return SpanConditions(cyclic=cyc, dual_fixed_trivial=(len(fixed) == 0),
                          cyclic_rank=rep_rank, dual_fixed_dim=len(fixed))


def _witness_rows(pair: PairSpec, gs) -> np.ndarray:
    """System rows [statistic(g), -log-characters(g), -1] whose nullspace
    holds the redundancy directions."""
    stats = pair.rep.orbit_of(pair.v0, np.array(gs))
    chars = pair.characters.log_values_many(np.array(gs))
    ones = np.ones((len(gs), 1))
    return np.hstack([stats, -chars, -ones])


def injectivity_check(pair: PairSpec, n_samples: int = DEFAULT_SAMPLES,
                      seed: int = 0, rel_tol: float = 1e-9) -> InjectivityVerdict:
    """Decide identifiability of the natural parametrization.

    Builds the linear system <xi, rho(g) v0> = sum_j c_j logchi_j(g) + c over
    sampled g and inspects its nullspace.  Nullspace directions whose covector
    part is (numerically) zero only witness linear dependence among the
    declared characters and are ignored.  A surviving direction is normalized
    (unit covector, first nonzero component positive) and re-validated on a
    fresh sample set before being returned as a witness.
    """
    dim = pair.rep.dim
    k = pair.characters.basis_size
    needed = dim + k + 1
    if n_samples < needed:
        raise InsufficientSamplesError(
            f"need at least {needed} samples for dim={dim} and basis size {k}, "
            f"got {n_samples}")
    gs = sample_group(pair.chart, n_samples, seed)
    system = _witness_rows(pair, gs)
    report = rank(system, rel_tol)
    null = nullspace(system, rel_tol)

    margin = 0.0
    candidate = None
    for vec in null:
        xi_norm = np.linalg.norm(vec[:dim])
        ratio = xi_norm / np.linalg.norm(vec)
        if ratio <= _XI_ZERO_MARGIN:
            margin = max(margin, ratio)
            continue
        if candidate is None:
            candidate = vec
    assumption = (f"relative to the declared character basis "
                  f"({pair.characters.kind}, size {k})")
    if candidate is None:
        return InjectivityVerdict(True, None, report, margin, assumption)

    xi = candidate[:dim]
    scale = 1.0 / np.linalg.norm(xi)
    sign = 1.0
    for entry in xi:
        if abs(entry) > 1e-12:
            sign = math.copysign(1.0, entry)
            break
    vec = candidate * scale * sign
    xi, coeffs, const = vec[:dim], vec[dim:dim + k], float(vec[dim + k])

    fresh = sample_group(pair.chart, n_samples, seed + 104729)
    resid = float(np.max(np.abs(_witness_rows(pair, fresh) @ vec)))
    if resid > 1e-8:
        raise ArithmeticError(
            f"witness failed fresh-sample validation (residual {resid:.2e}); "
            "the sampled nullspace was spurious")
    witness = Witness(covector=xi, char_coeffs=coeffs, constant=const,
                      fresh_residual=resid)
    return InjectivityVerdict(False, witness, report, margin, assumption)


def well_definedness_check(pair: PairSpec, seed: int = 0,
                           n_samples: int = 16, tol: float = 1e-10) -> WellDefinednessReport:
    """Verify the statistic ignores the subgroup: rho(g h) v0 == rho(g) v0.

    A violation pinpoints the offending (g, h) and means v0 is not actually
    fixed by the subgroup.
    """
    if pair.subgroup.kind == "trivial" or not pair.subgroup.elements:
        return WellDefinednessReport(True, 0.0)
    worst = 0.0
    offending = None
    for g in sample_group(pair.chart, n_samples, seed):
        base = rep_eval(pair.rep, g) @ pair.v0
        for h in pair.subgroup.elements:
            moved = rep_eval(pair.rep, pair.chart.compose(g, h)) @ pair.v0
            resid = float(np.max(np.abs(moved - base)))
            if resid > worst:
                worst, offending = resid, (g, h)
    passed = worst <= tol
    return WellDefinednessReport(passed, worst, None if passed else offending)

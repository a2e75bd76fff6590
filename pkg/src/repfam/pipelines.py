"""Pipelines behind the service endpoints and the CLI subcommands."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import specfile as sf
from .diagnostics import (
    affine_span_check,
    cyclic_check,
    h_fixed_subspace,
    injectivity_check,
    span_conditions_check,
    well_definedness_check,
)
from .equivalence import default_grid, find_equivalence, same_family_check
from .errors import MembershipError, SpecError
from .family import (
    CarrierSpec,
    FamilySpec,
    NaturalParam,
    gig_family,
    integrability_check,
    log_normalizer,
    pdf_values,
    sample,
)
from .numkernel import Rng, RankReport
from .special import GigParams, gig_norm_const


def _provenance(spec: sf.SpecFileModel) -> sf.Provenance:
    return sf.Provenance(seed=spec.samples.seed, sample_count=spec.samples.count,
                         tolerances=spec.tolerances)


def _rank_evidence(report: RankReport, dim: int) -> sf.RankEvidence:
    return sf.RankEvidence(rank=report.rank, dim=dim,
                           singular_values=[float(s) for s in report.singular_values],
                           threshold=report.tolerance_used)


def run_check(spec: sf.SpecFileModel) -> sf.CheckReport:
    """Full diagnostic pipeline: well-definedness, cyclicity, affine span,
    span conditions, then the injectivity decision."""
    pair = sf.build_pair(spec)
    n, seed = spec.samples.count, spec.samples.seed
    rel = spec.tolerances.rank_rel

    wd = well_definedness_check(pair, seed=seed)
    fixed_dim = len(h_fixed_subspace(pair.rep, pair.subgroup, rel))
    cyc, cyc_rank = cyclic_check(pair, n, seed, rel)
    aff, aff_rank = affine_span_check(pair, n, seed, rel)
    span = span_conditions_check(pair, n, seed, rel)
    verdict = injectivity_check(pair, n, seed, rel)

    witness = None
    if verdict.witness is not None:
        w = verdict.witness
        witness = sf.WitnessModel(covector=[float(v) for v in w.covector],
                                  char_coeffs=[float(v) for v in w.char_coeffs],
                                  constant=w.constant,
                                  fresh_residual=w.fresh_residual)
    return sf.CheckReport(
        well_defined=sf.WellDefinedReport(passed=wd.passed, max_residual=wd.max_residual),
        fixed_subspace_dim=fixed_dim,
        cyclic=sf.BoolWithRank(value=cyc, evidence=_rank_evidence(cyc_rank, pair.rep.dim)),
        affine_span=sf.BoolWithRank(value=aff, evidence=_rank_evidence(aff_rank, pair.rep.dim)),
        span_conditions=sf.SpanConditionsReport(
            cyclic=span.cyclic, dual_fixed_trivial=span.dual_fixed_trivial,
            dual_fixed_dim=span.dual_fixed_dim),
        injective=sf.InjectiveReport(
            value=verdict.injective, xi_margin=verdict.xi_margin,
            assumption=verdict.assumption,
            evidence=_rank_evidence(verdict.rank_details,
                                    pair.rep.dim + pair.characters.basis_size + 1),
            witness=witness),
        provenance=_provenance(spec))


def run_equiv(spec_a: sf.SpecFileModel, spec_b: sf.SpecFileModel) -> sf.EquivReport:
    pair_a = sf.build_pair(spec_a)
    pair_b = sf.build_pair(spec_b)
    n, seed = spec_a.samples.count, spec_a.samples.seed
    result = find_equivalence(pair_a, pair_b, n_samples=min(n, 32), seed=seed)
    same = same_family_check(pair_a, pair_b)
    if result is not None:
        status = "equivalent"
    elif same:
        status = "same family, equivalence not found"
    else:
        status = "not equivalent"
    return sf.EquivReport(
        equivalent=result is not None,
        psi=None if result is None else [[float(v) for v in row] for row in result.psi],
        residual=None if result is None else result.residual,
        same_family=same,
        status=status,
        provenance=_provenance(spec_a))


def run_family(spec: sf.SpecFileModel, theta: Sequence[float],
               grid: Optional[Tuple[float, float, int]] = None,
               sample_request: Optional[Tuple[int, int]] = None) -> sf.FamilyReport:
    """Evaluate the realized family: density grid or deterministic samples."""
    pair = sf.build_pair(spec)
    fam = FamilySpec(pair=pair, carrier=CarrierSpec.haar(pair.chart))
    dim, k = pair.rep.dim, pair.characters.basis_size
    theta = [float(t) for t in theta]
    if len(theta) != dim + k:
        raise SpecError(
            f"--theta needs {dim + k} entries ({dim} statistic coefficients plus "
            f"{k} character coefficients), got {len(theta)}")
    param = NaturalParam(stat_coeffs=np.array(theta[:dim]),
                         char_coeffs=np.array(theta[dim:]))
    membership = integrability_check(fam, param)
    mem_model = sf.MembershipModel(decision=membership.decision,
                                   method=membership.method,
                                   detail=membership.detail)
    prov = _provenance(spec)
    if membership.decision == "outside":
        return sf.FamilyReport(status="outside_domain", membership=mem_model,
                               provenance=prov)
    try:
        phi = log_normalizer(fam, param, spec.tolerances.quad_tol)
    except MembershipError as exc:
        mem_model = sf.MembershipModel(decision="outside", method=membership.method,
                                       detail={**membership.detail, "quadrature": str(exc)})
        return sf.FamilyReport(status="outside_domain", membership=mem_model,
                               provenance=prov)

    rows = None
    draws = None
    if grid is not None:
        lo, hi, count = grid
        if count < 1 or not (lo < hi):
            raise SpecError(f"grid needs lo < hi and n >= 1, got {lo}:{hi}:{count}")
        xs = np.linspace(lo, hi, count)
        vals = pdf_values(fam, param, xs, spec.tolerances.quad_tol)
        rows = [[float(x), float(v)] for x, v in zip(xs, vals)]
    if sample_request is not None:
        count, seed = sample_request
        if count < 1:
            raise SpecError(f"sample count must be >= 1, got {count}")
        draws = [float(x) for x in sample(fam, param, count, seed,
                                          spec.tolerances.quad_tol)]
    return sf.FamilyReport(status="ok", membership=mem_model, phi=phi,
                           grid=rows, samples=draws, provenance=prov)


# ---------------------------------------------------------------------------
# end-to-end verification of the worked example
# ---------------------------------------------------------------------------

_NORMALIZER_GRID = [
    (2.0, 2.0, 0.5), (2.0, 2.0, 1.0), (1.0, 3.0, -0.7), (0.5, 4.0, 2.0),
    (2.0, 0.0, 1.0), (2.0, 0.0, 3.0), (3.0, 0.0, 0.5), (0.0, 2.0, -3.0),
    (0.0, 1.0, -0.5),
]


def _random_valid_triples(seed: int, count: int = 3) -> List[Tuple[float, float, float]]:
    rng = Rng(seed ^ 0x9E3779B9)
    draw = lambda lo, hi: lo + (hi - lo) * rng.uniform()
    out = []
    for i in range(count):
        case = i % 3
        if case == 0:
            out.append((math.exp(draw(-1.0, 1.5)), math.exp(draw(-1.0, 1.5)),
                        draw(-2.0, 2.0)))
        elif case == 1:
            out.append((math.exp(draw(-1.0, 1.5)), 0.0, draw(0.2, 3.0)))
        else:
            out.append((0.0, math.exp(draw(-1.0, 1.5)), draw(-3.0, -0.2)))
    return out


def run_verify_gig(seed: int = 0,
                   tolerances: Optional[sf.TolerancesModel] = None) -> sf.VerifyGigReport:
    """Cross-check the worked example end to end: quadrature normalizers
    against the closed forms for all three parameter regimes, the
    identifiability verdict, and intertwiners between rescaled generating
    vectors together with transported densities."""
    tols = tolerances or sf.TolerancesModel()
    fam = gig_family()
    cases = []
    all_ok = True
    for a, b, lam in _NORMALIZER_GRID + _random_valid_triples(seed):
        param = NaturalParam(stat_coeffs=np.array([a, b]), char_coeffs=np.array([lam]))
        phi = log_normalizer(fam, param, tols.quad_tol)
        closed = 1.0 / gig_norm_const(GigParams(a, b, lam))
        rel = abs(math.exp(phi) - closed) / closed
        ok = rel <= tols.residual
        all_ok &= ok
        cases.append(sf.NormalizerCase(
            a=a, b=b, lam=lam, case=GigParams(a, b, lam).case, phi=phi,
            quadrature_mass=math.exp(phi), closed_form_mass=closed,
            rel_error=rel, passed=ok))

    verdict = injectivity_check(fam.pair, seed=seed)
    inj = sf.InjectivityCase(injective=verdict.injective, expected=True,
                             passed=verdict.injective, assumption=verdict.assumption)
    all_ok &= inj.passed

    rng = Rng(seed ^ 0x51ED270)
    equiv_cases = []
    base_thetas = [(2.0, 2.0, 0.5), (2.0, 0.0, 1.0)]
    for _ in range(3):
        r = math.copysign(0.25 + 3.0 * rng.uniform(), rng.uniform() - 0.5)
        s = math.copysign(0.25 + 3.0 * rng.uniform(), rng.uniform() - 0.5)
        other = gig_family(v0=(r, s))
        result = find_equivalence(fam.pair, other.pair, seed=seed)
        if result is None:
            all_ok = False
            equiv_cases.append(sf.EquivalenceCase(
                r=r, s=s, psi=[], psi_error=math.inf, pdf_residual=math.inf,
                passed=False))
            continue
        psi = result.psi
        psi_err = float(np.max(np.abs(psi - np.diag([2.0 * r, 2.0 * s]))))
        grid = default_grid(fam.carrier.chart, 32)
        worst_pdf = 0.0
        inv_t = np.linalg.inv(psi).T
        for a, b, lam in base_thetas:
            t1 = NaturalParam(np.array([a, b]), np.array([lam]))
            t2 = NaturalParam(inv_t @ t1.stat_coeffs, t1.char_coeffs)
            p1 = pdf_values(fam, t1, grid, tols.quad_tol)
            p2 = pdf_values(other, t2, grid, tols.quad_tol)
            worst_pdf = max(worst_pdf, float(np.max(np.abs(p1 - p2))))
        ok = psi_err <= tols.residual and worst_pdf <= 1e-10
        all_ok &= ok
        equiv_cases.append(sf.EquivalenceCase(
            r=r, s=s, psi=[[float(v) for v in row] for row in psi],
            psi_error=psi_err, pdf_residual=worst_pdf, passed=ok))

    prov = sf.Provenance(seed=seed, sample_count=64, tolerances=tols)
    return sf.VerifyGigReport(passed=bool(all_ok), normalizer_cases=cases,
                              injectivity=inj, equivalence_cases=equiv_cases,
                              provenance=prov)

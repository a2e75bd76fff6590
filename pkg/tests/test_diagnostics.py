import math

import numpy as np
import pytest

from repfam.diagnostics import (
    PairSpec,
    affine_span_check,
    cyclic_check,
    dual_fixed_vectors,
    h_fixed_subspace,
    injectivity_check,
    span_conditions_check,
    well_definedness_check,
)
from repfam.errors import InsufficientSamplesError, SpecError
from repfam.groupmodel import (
    CharacterBasis,
    SubgroupSpec,
    TRIVIAL_CHARACTERS,
    chart,
    diagonal_weights,
    rotation,
    sample_group,
)

POS = chart("positive_reals")
CIRCLE = chart("circle")
POWER = CharacterBasis(kind="power")


def gig_pair(v0=(0.5, 0.5), characters=POWER):
    return PairSpec(rep=diagonal_weights(POS, [1.0, -1.0]), v0=np.array(v0),
                    chart=POS, characters=characters)


def catalog_pairs(min_count=20):
    """Deterministic randomized catalog: diagonal weights in {-2..2},
    v0 entries in {-1, 0, 1}, zero vector excluded."""
    gen = np.random.default_rng(2024)
    pairs = []
    while len(pairs) < min_count:
        dim = int(gen.integers(1, 4))
        weights = gen.integers(-2, 3, size=dim).astype(float)
        v0 = gen.integers(-1, 2, size=dim).astype(float)
        if not np.any(v0):
            continue
        pairs.append(PairSpec(rep=diagonal_weights(POS, weights), v0=v0,
                              chart=POS, characters=TRIVIAL_CHARACTERS))
    return pairs


# ------------------------------------------------------------------ pairspec

def test_pairspec_rejects_zero_vector():
    with pytest.raises(SpecError):
        gig_pair(v0=(0.0, 0.0))


def test_pairspec_rejects_dimension_mismatch():
    with pytest.raises(SpecError):
        gig_pair(v0=(1.0, 2.0, 3.0))


def test_pairspec_rejects_unfixed_vector():
    sub = SubgroupSpec(kind="finite_list", elements=(math.pi,))
    with pytest.raises(SpecError):
        PairSpec(rep=rotation(CIRCLE, [1.0]), v0=np.array([1.0, 0.0]),
                 chart=CIRCLE, subgroup=sub)
    # the escape hatch allows building the broken pair for negative tests
    broken = PairSpec.unchecked(rep=rotation(CIRCLE, [1.0]), v0=np.array([1.0, 0.0]),
                                chart=CIRCLE, subgroup=sub)
    assert broken.v0[0] == 1.0


# ------------------------------------------------------------- h-fixed space

def test_h_fixed_trivial_subgroup_full_basis():
    rep = diagonal_weights(POS, [1.0, -1.0])
    basis = h_fixed_subspace(rep, SubgroupSpec())
    assert len(basis) == 2


def test_h_fixed_rotation_by_pi_empty():
    rep = rotation(CIRCLE, [1.0])
    basis = h_fixed_subspace(rep, SubgroupSpec(kind="finite_list", elements=(math.pi,)))
    assert basis == []


def test_h_fixed_weight_zero_axis():
    rep = diagonal_weights(POS, [1.0, 0.0])
    basis = h_fixed_subspace(rep, SubgroupSpec(kind="finite_list", elements=(2.0,)))
    assert len(basis) == 1
    assert abs(abs(basis[0][1]) - 1.0) < 1e-12 and abs(basis[0][0]) < 1e-12


# -------------------------------------------------------------------- cyclic

def test_axis_vector_not_cyclic():
    ok, report = cyclic_check(gig_pair(v0=(1.0, 0.0)))
    assert not ok and report.rank == 1


def test_generic_vector_cyclic():
    ok, report = cyclic_check(gig_pair())
    assert ok and report.rank == 2


def test_zero_vector_not_cyclic():
    pair = PairSpec.unchecked(rep=diagonal_weights(POS, [1.0, -1.0]),
                              v0=np.array([0.0, 0.0]), chart=POS)
    ok, report = cyclic_check(pair)
    assert not ok and report.rank == 0


# ------------------------------------------------------------- dual fixed

def test_dual_fixed_empty_for_gig_weights():
    assert dual_fixed_vectors(diagonal_weights(POS, [1.0, -1.0])) == []


def test_dual_fixed_weight_zero_axis():
    vecs = dual_fixed_vectors(diagonal_weights(POS, [1.0, 0.0]))
    assert len(vecs) == 1
    assert abs(abs(vecs[0][1]) - 1.0) < 1e-12


def test_dual_fixed_trivial_rep_everything():
    vecs = dual_fixed_vectors(diagonal_weights(POS, [0.0]))
    assert len(vecs) == 1


# --------------------------------------------------------------- affine span

def test_affine_span_gig_vector():
    # oracle: columns at g in {2, 4} are (0.5, -0.25), (1.5, -0.375),
    # determinant 0.5*(-0.375) - 1.5*(-0.25) = 0.1875 != 0
    ok, report = affine_span_check(gig_pair())
    assert ok and report.rank == 2


def test_affine_span_fails_on_constant_coordinate():
    pair = PairSpec(rep=diagonal_weights(POS, [1.0, 0.0]), v0=np.array([1.0, 1.0]),
                    chart=POS, characters=TRIVIAL_CHARACTERS)
    ok, report = affine_span_check(pair)
    assert not ok and report.rank == 1


def test_affine_span_zero_vector():
    pair = PairSpec.unchecked(rep=diagonal_weights(POS, [1.0, -1.0]),
                              v0=np.array([0.0, 0.0]), chart=POS)
    ok, _ = affine_span_check(pair)
    assert not ok


# ------------------------------------------------------------- span pair

def test_span_conditions_gig():
    cond = span_conditions_check(gig_pair())
    assert cond.cyclic and cond.dual_fixed_trivial and cond.both


def test_span_conditions_weight_zero():
    pair = PairSpec(rep=diagonal_weights(POS, [1.0, 0.0]), v0=np.array([1.0, 1.0]),
                    chart=POS)
    cond = span_conditions_check(pair)
    assert cond.cyclic and not cond.dual_fixed_trivial


def test_span_conditions_axis_vector():
    cond = span_conditions_check(gig_pair(v0=(1.0, 0.0)))
    assert not cond.cyclic and cond.dual_fixed_trivial


def test_affine_span_equals_conjunction_on_catalog():
    for pair in catalog_pairs(24):
        a, _ = affine_span_check(pair)
        cond = span_conditions_check(pair)
        assert a == cond.both


# ---------------------------------------------------------------- injectivity

def test_gig_injective_with_power_characters():
    verdict = injectivity_check(gig_pair())
    assert verdict.injective and verdict.witness is None
    assert "power" in verdict.assumption


def test_trivial_rep_witness():
    pair = PairSpec(rep=diagonal_weights(POS, [0.0]), v0=np.array([1.0]), chart=POS,
                    characters=TRIVIAL_CHARACTERS)
    verdict = injectivity_check(pair)
    assert not verdict.injective
    w = verdict.witness
    assert w.covector[0] == pytest.approx(1.0, abs=1e-12)
    assert w.constant == pytest.approx(1.0, abs=1e-10)
    assert w.char_coeffs.size == 0


def test_constant_second_statistic_witness():
    pair = PairSpec(rep=diagonal_weights(POS, [1.0, 0.0]), v0=np.array([1.0, 1.0]),
                    chart=POS, characters=POWER)
    verdict = injectivity_check(pair)
    assert not verdict.injective
    w = verdict.witness
    assert np.allclose(w.covector, [0.0, 1.0], atol=1e-10)
    assert np.allclose(w.char_coeffs, [0.0], atol=1e-10)
    assert w.constant == pytest.approx(1.0, abs=1e-10)


def test_witness_sound_on_fresh_samples():
    pair = PairSpec(rep=diagonal_weights(POS, [1.0, 1.0]), v0=np.array([1.0, 1.0]),
                    chart=POS, characters=POWER)
    verdict = injectivity_check(pair, seed=5)
    assert not verdict.injective  # both statistics equal g = exp(log g)
    w = verdict.witness
    for g in sample_group(POS, 32, seed=99)[1:]:
        stat = np.exp(np.array([1.0, 1.0]) * math.log(g)) * np.array([1.0, 1.0])
        lhs = w.covector @ stat
        rhs = w.char_coeffs @ np.array([math.log(g)]) + w.constant
        assert abs(lhs - rhs) <= 1e-8


def test_injectivity_requires_enough_samples():
    with pytest.raises(InsufficientSamplesError):
        injectivity_check(gig_pair(), n_samples=3)


def test_injective_implies_affine_span_on_catalog():
    for pair in catalog_pairs(24):
        verdict = injectivity_check(pair)
        a, _ = affine_span_check(pair)
        if verdict.injective:
            assert a


def test_trivial_characters_injectivity_equals_affine_span():
    for pair in catalog_pairs(24):
        verdict = injectivity_check(pair)
        a, _ = affine_span_check(pair)
        assert verdict.injective == a


def test_dual_fixed_vector_annihilates_orbit_differences():
    # any dual-fixed covector pairs identically with rho(g) v0 - v0
    for pair in catalog_pairs(24):
        fixed = dual_fixed_vectors(pair.rep)
        if not fixed:
            continue
        gs = np.array(sample_group(POS, 16, seed=1))
        stats = pair.rep.orbit_of(pair.v0, gs) - pair.v0[None, :]
        for xi in fixed:
            assert np.max(np.abs(stats @ xi)) <= 1e-8


# ------------------------------------------------------------ well-definedness

def test_well_definedness_trivial_subgroup():
    report = well_definedness_check(gig_pair())
    assert report.passed and report.max_residual == 0.0


def test_well_definedness_detects_unfixed_vector():
    sub = SubgroupSpec(kind="finite_list", elements=(math.pi,))
    broken = PairSpec.unchecked(rep=rotation(CIRCLE, [1.0]), v0=np.array([1.0, 0.0]),
                                chart=CIRCLE, subgroup=sub)
    report = well_definedness_check(broken)
    assert not report.passed
    assert report.offending is not None and report.offending[1] == math.pi


def test_well_definedness_fixed_axis_passes():
    sub = SubgroupSpec(kind="finite_list", elements=(2.0,))
    pair = PairSpec(rep=diagonal_weights(POS, [1.0, 0.0]), v0=np.array([0.0, 1.0]),
                    chart=POS, subgroup=sub)
    report = well_definedness_check(pair)
    assert report.passed

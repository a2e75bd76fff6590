import math

import pytest

from repfam.errors import DomainError
from repfam.numkernel import integrate_halfline
from repfam.special import GigParams, bessel_k, gamma_fn, gig_norm_const, gig_pdf


def bessel_k_bruteforce(lam: float, x: float) -> float:
    """Independent oracle: uniform trapezoid on the cosh integral representation.

    The integrand decays double-exponentially in t, so the trapezoid rule is
    spectrally accurate; the step is halved until two sweeps agree to 1e-13.
    """
    lam = abs(lam)

    def f(t):
        log_term = -x * math.cosh(t) + abs(lam * t) + math.log1p(
            math.exp(-2.0 * abs(lam * t))) - math.log(2.0)
        return math.exp(log_term) if log_term > -745.0 else 0.0

    t_max = 1.0
    while x * math.cosh(t_max) - lam * t_max < 760.0:
        t_max += 0.5
    h = 0.05
    prev = None
    for _ in range(12):
        n = int(t_max / h) + 1
        total = 0.5 * f(0.0) + sum(f(k * h) for k in range(1, n))
        est = h * total
        if prev is not None and abs(est - prev) <= 1e-13 * max(abs(est), 1.0):
            return est
        prev = est
        h *= 0.5
    raise AssertionError("brute-force Bessel oracle did not settle")


# ---------------------------------------------------------------------- gamma

def test_gamma_factorials():
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-12)
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-12)


def test_gamma_half():
    # oracle: Gaussian integral identity Gamma(1/2) = sqrt(pi)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_gamma_recurrence():
    for x in (0.5, 1.3, 4.7):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)


def test_gamma_large_argument():
    # oracle: 49! accumulated with exact integer arithmetic
    fact = 1
    for k in range(1, 50):
        fact *= k
    assert gamma_fn(50.0) == pytest.approx(float(fact), rel=1e-12)


def test_gamma_domain():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-1.5)


# --------------------------------------------------------------------- bessel

def test_bessel_half_closed_form():
    # oracle: K_{1/2}(z) = sqrt(pi / (2 z)) exp(-z)
    expected = math.sqrt(math.pi / 4.0) * math.exp(-2.0)
    assert bessel_k(0.5, 2.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.11993777, abs=5e-9)


def test_bessel_symmetry_in_order():
    a = bessel_k(1.7, 2.3)
    b = bessel_k(-1.7, 2.3)
    assert a == pytest.approx(b, rel=1e-12)


def test_bessel_k0_reference():
    # frozen from the brute-force trapezoid oracle at tolerance 1e-13
    ref = bessel_k_bruteforce(0.0, 1.0)
    assert ref == pytest.approx(0.42102444, abs=5e-9)
    assert bessel_k(0.0, 1.0) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("lam,x", [
    (0.0, 0.001), (0.0, 0.1), (0.0, 1.0), (0.0, 10.0), (0.0, 50.0),
    (0.5, 0.01), (0.5, 2.0), (1.0, 0.5), (1.0, 5.0), (2.0, 1.0),
    (3.3, 0.7), (5.0, 12.0), (7.5, 3.0), (10.0, 0.05), (10.0, 25.0),
    (15.0, 1.0), (20.0, 8.0), (30.0, 2.5), (42.0, 30.0), (50.0, 50.0),
])
def test_bessel_matches_bruteforce_oracle(lam, x):
    assert bessel_k(lam, x) == pytest.approx(bessel_k_bruteforce(lam, x), rel=1e-9)


def test_bessel_recurrence():
    # K_{lam+1}(x) = K_{lam-1}(x) + (2 lam / x) K_lam(x)
    for lam, x in [(1.0, 2.0), (2.5, 1.0), (4.0, 7.0)]:
        lhs = bessel_k(lam + 1.0, x)
        rhs = bessel_k(lam - 1.0, x) + (2.0 * lam / x) * bessel_k(lam, x)
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)
    with pytest.raises(DomainError):
        bessel_k(51.0, 1.0)


# ------------------------------------------------------------------------ gig

def test_gig_params_cases():
    assert GigParams(2.0, 2.0, 0.5).case == "standard"
    assert GigParams(2.0, 0.0, 3.0).case == "gamma"
    assert GigParams(0.0, 2.0, -3.0).case == "inverse_gamma"
    for bad in [(1.0, 0.0, -1.0), (0.0, 0.0, 1.0), (-1.0, 1.0, 0.0), (0.0, 1.0, 0.5)]:
        with pytest.raises(DomainError):
            GigParams(*bad)


def test_gig_norm_const_values():
    # oracles: K_{1/2} closed form and Gamma(3) = 2
    c1 = gig_norm_const(GigParams(2.0, 2.0, 0.5))
    assert c1 == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi / 4.0) * math.exp(-2.0)), rel=1e-10)
    assert gig_norm_const(GigParams(2.0, 0.0, 3.0)) == pytest.approx(0.5, rel=1e-12)
    assert gig_norm_const(GigParams(0.0, 2.0, -3.0)) == pytest.approx(0.5, rel=1e-12)


def test_gig_pdf_values():
    p = GigParams(2.0, 2.0, 0.5)
    expected = math.exp(-2.0) / (2.0 * math.sqrt(math.pi / 4.0) * math.exp(-2.0))
    assert gig_pdf(p, 1.0) == pytest.approx(expected, rel=1e-10)
    assert gig_pdf(GigParams(2.0, 0.0, 1.0), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    with pytest.raises(DomainError):
        gig_pdf(p, 0.0)


def test_gig_pdf_normalized_by_quadrature():
    for params in [GigParams(2.0, 2.0, 0.5), GigParams(2.0, 0.0, 1.0),
                   GigParams(0.0, 2.0, -3.0), GigParams(1.0, 3.0, -0.7)]:
        res = integrate_halfline(lambda x: gig_pdf(params, x), tol=1e-11)
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-8)


def test_gig_case_boundary_continuity():
    # small-argument limit: case (a>0, b->0+) approaches the gamma-case constant
    lam = 1.5
    near = gig_norm_const(GigParams(2.0, 1e-8, lam))
    limit = gig_norm_const(GigParams(2.0, 0.0, lam))
    assert near == pytest.approx(limit, rel=1e-5)

"""Dense linear algebra with explicit tolerances, 1-D quadrature, and a seeded RNG.

Rank and nullspace decisions are SVD-based with a relative threshold
(``rel_tol * sigma_max``), so they survive the diagonal-weight scalings used by
the representation catalog.  Quadrature uses double-exponential rules:
tanh-sinh on finite intervals (endpoint singularities welcome) and exp-sinh on
the half line.  The RNG is xoshiro256** seeded through splitmix64, fixed across
releases so sampling tests are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import InvalidInputError

_HALF_PI = math.pi / 2.0


# ---------------------------------------------------------------------------
# matrix helpers
# ---------------------------------------------------------------------------

def as_matrix(entries) -> np.ndarray:
    """Coerce to a 2-D float array, rejecting empty or non-finite input."""
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidInputError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix entries must be finite (no NaN/Inf)")
    return m


def as_vector(entries) -> np.ndarray:
    """Coerce to a 1-D float array with finite entries."""
    v = np.asarray(entries, dtype=float).reshape(-1)
    if v.size == 0:
        raise InvalidInputError("expected a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector entries must be finite (no NaN/Inf)")
    return v


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of a matrix together with the evidence that produced it."""

    rank: int
    singular_values: tuple
    tolerance_used: float

    def __post_init__(self):
        svals = tuple(float(s) for s in self.singular_values)
        object.__setattr__(self, "singular_values", svals)


def _check_rel_tol(rel_tol: float) -> None:
    if not (0.0 < rel_tol < 1.0):
        raise InvalidInputError(f"rel_tol must lie in (0, 1), got {rel_tol}")


def rank(matrix, rel_tol: float = 1e-9) -> RankReport:
    """Numerical rank against the threshold ``rel_tol * sigma_max``.

    Deterministic for identical inputs; singular values are reported in
    descending order so rank decisions can be audited.
    """
    m = as_matrix(matrix)
    _check_rel_tol(rel_tol)
    svals = np.linalg.svd(m, compute_uv=False)
    sigma_max = float(svals[0]) if svals.size else 0.0
    threshold = rel_tol * sigma_max
    r = int(np.sum(svals > threshold))
    return RankReport(rank=r, singular_values=tuple(svals), tolerance_used=threshold)


def nullspace(matrix, rel_tol: float = 1e-9) -> List[np.ndarray]:
    """Orthonormal basis of the (right) nullspace at relative tolerance ``rel_tol``.

    Each returned vector v satisfies ``|M v| <= rel_tol * sigma_max`` up to
    roundoff; the list has ``cols - rank`` elements.
    """
    m = as_matrix(matrix)
    _check_rel_tol(rel_tol)
    _, svals, vt = np.linalg.svd(m)
    sigma_max = float(svals[0]) if svals.size else 0.0
    threshold = rel_tol * sigma_max
    r = int(np.sum(svals > threshold))
    return [vt[i].copy() for i in range(r, m.shape[1])]


# ---------------------------------------------------------------------------
# double-exponential quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    """Outcome of a quadrature call.

    ``converged`` means successive refinement levels agreed to the requested
    tolerance relative to the integral's own magnitude; ``divergent`` is set
    when estimates grew without bound instead of settling.
    """

    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int
    divergent: bool = False


def _check_tol(tol: float) -> None:
    if not (0.0 < tol < 1.0):
        raise InvalidInputError(f"tol must lie in (0, 1), got {tol}")


def _de_levels(term_at, tol: float, t_cap: float, max_level: int):
    """Shared trapezoid-refinement driver for the double-exponential rules.

    ``term_at(t)`` returns the transformed integrand value (already including
    the substitution weight) or None for nodes that under/overflow out of
    range.  Returns (value, error_estimate, converged, evaluations, divergent).

    Each refinement level halves the mesh and evaluates only the new (odd)
    nodes.  A sweep walks outward from the center and stops once terms fall
    19 orders of magnitude below the largest term seen, which is safe because
    the transformed integrand decays double-exponentially.
    """
    evaluations = 0
    saw_nonfinite = False

    def sweep(h: float, odd_only: bool) -> float:
        nonlocal evaluations, saw_nonfinite
        total = 0.0
        for sign in (1.0, -1.0):
            start = 1 if (odd_only or sign < 0) else 0
            step = 2 if odd_only else 1
            peak = 0.0
            dead = 0
            k = start
            while k * h <= t_cap:
                term = term_at(sign * k * h)
                evaluations += 1
                if term is None:
                    term = 0.0
                elif not math.isfinite(term):
                    saw_nonfinite = True
                    term = 0.0
                total += term
                mag = abs(term)
                peak = max(peak, mag)
                if peak > 0.0 and mag <= 1e-19 * peak:
                    dead += 1
                    if dead >= 4:
                        break
                else:
                    dead = 0
                k += step
        return total

    h = 1.0
    total = sweep(h, odd_only=False)
    estimates = [h * total]
    if saw_nonfinite:
        return estimates[-1], math.inf, False, evaluations, True
    err = math.inf
    for _level in range(1, max_level + 1):
        h *= 0.5
        total += sweep(h, odd_only=True)
        estimates.append(h * total)
        if saw_nonfinite or not math.isfinite(estimates[-1]):
            return estimates[-1], math.inf, False, evaluations, True
        err = abs(estimates[-1] - estimates[-2])
        # relative criterion: integrals here range over hundreds of orders of
        # magnitude, so flooring the scale at 1 would accept tiny integrals
        # at level 1 with no relative accuracy at all
        if estimates[-1] == 0.0 and estimates[-2] == 0.0 and _level >= 2:
            return 0.0, 0.0, True, evaluations, False
        if err <= tol * max(abs(estimates[-1]), 1e-300):
            return estimates[-1], max(err, 1e-300), True, evaluations, False
    # not converged: estimates still growing at the finest levels means the
    # integral is blowing up rather than merely under-resolved
    grew_last = abs(estimates[-1]) > 1.5 * (abs(estimates[-2]) + 1e-300)
    grew_prev = abs(estimates[-2]) > 1.5 * (abs(estimates[-3]) + 1e-300)
    return estimates[-1], err, False, evaluations, grew_last and grew_prev


def integrate_interval(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-10, max_level: int = 12) -> QuadResult:
    """Integrate f over the finite interval (a, b) with a tanh-sinh rule.

    Nodes cluster double-exponentially toward both endpoints, so integrable
    endpoint singularities (x^{-1/2}, log x, ...) converge at full accuracy.
    The endpoints themselves are never evaluated.
    """
    _check_tol(tol)
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidInputError(f"need finite a < b, got a={a}, b={b}")
    half = 0.5 * (b - a)
    # node positions are doubles near max(|a|, |b|): on a narrow interval far
    # from zero they are quantized to a fixed fraction of the width, and no
    # refinement can resolve the integrand better than that
    position_floor = 4.0 * 2.22e-16 * max(abs(a), abs(b), 1e-300) / (b - a)
    tol = max(tol, min(position_floor, 0.1))

    def term_at(t: float):
        u = _HALF_PI * math.sinh(t)
        au = abs(u)
        if au > 350.0:
            return None
        # distance from the nearer endpoint, computed without cancellation
        e = math.exp(-2.0 * au)
        s = 2.0 * e / (1.0 + e)        # = 1 - |tanh u|
        sech2 = (2.0 * math.exp(-au) / (1.0 + e)) ** 2
        if u >= 0.0:
            x = b - half * s
            if x >= b:
                return None
        else:
            x = a + half * s
            if x <= a:
                return None
        w = half * _HALF_PI * math.cosh(t) * sech2
        if w == 0.0:
            return None
        fx = f(x)
        return w * fx

    value, err, converged, evals, diverged = _de_levels(term_at, tol, t_cap=5.0,
                                                        max_level=max_level)
    return QuadResult(value=value, abs_error_estimate=err, converged=converged,
                      evaluations=evals, divergent=diverged)


def integrate_halfline(f: Callable[[float], float], tol: float = 1e-10,
                       max_level: int = 12) -> QuadResult:
    """Integrate f over (0, inf) with an exp-sinh rule.

    The substitution x = exp((pi/2) sinh t) turns both power-law behaviour at
    0 and exponential or power-law decay at infinity into double-exponential
    decay of the transformed integrand.  Estimates that keep growing across
    refinement levels are flagged divergent instead of "converged".
    """
    _check_tol(tol)

    def term_at(t: float):
        u = _HALF_PI * math.sinh(t)
        if abs(u) > 700.0:
            return None
        x = math.exp(u)
        w = _HALF_PI * math.cosh(t) * x
        fx = f(x)
        return w * fx

    value, err, converged, evals, diverged = _de_levels(term_at, tol, t_cap=6.9,
                                                        max_level=max_level)
    return QuadResult(value=value, abs_error_estimate=err, converged=converged,
                      evaluations=evals, divergent=diverged)


def divergence_scan(f: Callable[[float], float], tol: float = 1e-7) -> str:
    """Heuristic integrability scan for f on (0, inf) via nested truncations.

    Integrates over (10^-k, 10^k) for k = 1..6 and compares successive
    estimates: growth ratio above 1.5 at the last two levels means
    "divergent"; stabilized estimates mean "convergent"; anything else is
    "inconclusive".  Heuristic only - callers must say so in reports.
    """
    panels = {}
    for j in range(-6, 6):
        res = integrate_interval(f, 10.0 ** j, 10.0 ** (j + 1), tol=tol)
        if res.divergent or not math.isfinite(res.value):
            return "divergent"
        panels[j] = res.value
    estimates = [sum(panels[j] for j in range(-k, k)) for k in range(1, 7)]
    r_last = abs(estimates[-1]) / max(abs(estimates[-2]), 1e-300)
    r_prev = abs(estimates[-2]) / max(abs(estimates[-3]), 1e-300)
    if r_last > 1.5 and r_prev > 1.5:
        return "divergent"
    # convergent when the truncation increments shrink geometrically
    d_last = abs(estimates[-1] - estimates[-2])
    d_prev = abs(estimates[-2] - estimates[-3])
    if d_last <= max(0.5 * d_prev, 1e-9 * abs(estimates[-1])):
        return "convergent"
    return "inconclusive"


# ---------------------------------------------------------------------------
# seeded RNG: xoshiro256** with splitmix64 seeding
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


@dataclass
class Rng:
    """xoshiro256** 1.0 (Blackman & Vigna), seeded via splitmix64.

    The algorithm is pinned: identical seeds produce identical streams across
    releases and platforms.  State is explicit, so independent streams are
    just independent instances.
    """

    seed: int
    _state: list = field(default=None, repr=False)

    def __post_init__(self):
        sm = self.seed & _MASK64
        state = []
        for _ in range(4):
            sm, word = _splitmix64(sm)
            state.append(word)
        self._state = state

    def next_uint64(self) -> int:
        s = self._state
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """One double in the open interval (0, 1)."""
        return (float(self.next_uint64() >> 11) + 0.5) * 2.0 ** -53

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


def rng_uniform(seed: int, n: int) -> np.ndarray:
    """Deterministic array of n uniforms in (0, 1) for the given seed."""
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    return Rng(seed).uniforms(n)


# ---------------------------------------------------------------------------
# fixed Gauss-Legendre nodes for vectorized panel integrals
# ---------------------------------------------------------------------------

_GL_CACHE = {}


def gauss_legendre(n: int):
    """Nodes/weights on [0, 1], cached; used for vectorized CDF panels."""
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def panel_integrals(f_many: Callable[[np.ndarray], np.ndarray],
                    lo: np.ndarray, hi: np.ndarray, n_nodes: int = 16) -> np.ndarray:
    """Vectorized Gauss-Legendre integrals of f over many intervals at once.

    ``f_many`` must accept an array of abscissae.  Intended for smooth
    integrands on short panels (CDF tables, quantile refinement).
    """
    nodes, weights = gauss_legendre(n_nodes)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    xs = lo[:, None] + width[:, None] * nodes[None, :]
    vals = f_many(xs.reshape(-1)).reshape(xs.shape)
    return width * (vals @ weights)

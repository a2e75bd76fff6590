"""One-dimensional group charts, representation catalog, and character bases.

Three charts are supported: the multiplicative positive reals, the additive
real line, and the circle (angles in (-pi, pi], composed mod 2 pi).  Every
catalog template is expressed through the chart's additive coordinate
(log g, g, or the angle), which makes each template an exact homomorphism
wherever it is valid; templates that cannot wrap around the circle are caught
by the construction-time validation rather than by special cases.

Universal statements "for all g" are tested on finitely many sampled chart
parameters.  For the catalog templates every identity under test is linear in
finitely many analytic functions of g, so holding at generic samples that
outnumber those functions implies holding identically; sample counts default
to 64 for this reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, InvalidInputError, SpecError
from .numkernel import Rng

_TWO_PI = 2.0 * math.pi

CHART_NAMES = ("positive_reals", "real_line", "circle")


@dataclass(frozen=True)
class GroupChart:
    """A 1-D coordinate chart for the group, with its sampling window.

    ``sampler`` is (kind, lo, hi): parameters are drawn as exp(U[lo, hi]) for
    ``log_uniform`` and U[lo, hi] otherwise.  Defaults keep catalog matrices
    within double-precision comfort for weights up to +-5.
    """

    name: str
    dim: int = 1
    sampler: Tuple[str, float, float] = None

    def __post_init__(self):
        if self.name not in CHART_NAMES:
            raise SpecError(f"unknown chart {self.name!r}; expected one of {CHART_NAMES}")
        if self.sampler is None:
            default = {
                "positive_reals": ("log_uniform", -2.0, 2.0),
                "real_line": ("uniform", -3.0, 3.0),
                "circle": ("uniform", -math.pi, math.pi),
            }[self.name]
            object.__setattr__(self, "sampler", default)

    @property
    def identity(self) -> float:
        return 1.0 if self.name == "positive_reals" else 0.0

    def contains(self, g: float) -> bool:
        if not math.isfinite(g):
            return False
        if self.name == "positive_reals":
            return g > 0.0
        if self.name == "circle":
            return -math.pi < g <= math.pi
        return True

    def check(self, g: float) -> float:
        g = float(g)
        if not self.contains(g):
            raise DomainError(f"parameter {g} outside the {self.name} chart")
        return g

    def compose(self, g: float, h: float) -> float:
        if self.name == "positive_reals":
            return g * h
        if self.name == "circle":
            r = math.fmod(g + h + math.pi, _TWO_PI)
            if r <= 0.0:
                r += _TWO_PI
            return r - math.pi
        return g + h

    def inverse(self, g: float) -> float:
        if self.name == "positive_reals":
            return 1.0 / g
        if self.name == "circle":
            return g if g == math.pi else -g
        return -g

    def additive_coordinate(self, g: float) -> float:
        """Coordinate in which the chart group law becomes addition."""
        return math.log(g) if self.name == "positive_reals" else g

    def draw(self, rng: Rng) -> float:
        kind, lo, hi = self.sampler
        u = lo + (hi - lo) * rng.uniform()
        return math.exp(u) if kind == "log_uniform" else u


def chart(name: str) -> GroupChart:
    return GroupChart(name=name)


@dataclass(frozen=True)
class SubgroupSpec:
    """Either the trivial subgroup or a finite list of chart parameters.

    The identity is always implicitly a member and never needs listing.
    """

    kind: str = "trivial"
    elements: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("trivial", "finite_list"):
            raise SpecError(f"unknown subgroup kind {self.kind!r}")
        elems = tuple(float(h) for h in self.elements)
        if self.kind == "trivial" and elems:
            raise SpecError("trivial subgroup must not list elements")
        object.__setattr__(self, "elements", elems)

    def validate_on(self, chart: GroupChart) -> None:
        for h in self.elements:
            if not chart.contains(h):
                raise SpecError(f"subgroup element {h} outside the {chart.name} chart")


TRIVIAL_SUBGROUP = SubgroupSpec()


# ---------------------------------------------------------------------------
# representation catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RepSpec:
    """A matrix representation from the template catalog, bound to its chart.

    Templates: ``diagonal_weights`` acts by exp(w_i * tau(g)) on each axis,
    ``rotation`` by 2x2 rotation blocks of angle f_i * tau(g),
    ``log_unipotent`` by [[1, -tau(g)], [0, 1]], and ``direct_sum`` stacks
    other templates block-diagonally.  Here tau is the chart's additive
    coordinate.  Use the factory functions below; they run the
    construction-time validation (identity, invertibility, homomorphism law
    on sampled pairs).
    """

    chart: GroupChart
    kind: str
    weights: Tuple[float, ...] = ()
    frequencies: Tuple[float, ...] = ()
    summands: Tuple["RepSpec", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))

    @property
    def dim(self) -> int:
        if self.kind == "diagonal_weights":
            return len(self.weights)
        if self.kind == "rotation":
            return 2 * len(self.frequencies)
        if self.kind == "log_unipotent":
            return 2
        return sum(part.dim for part in self.summands)

    def matrix_at(self, g: float) -> np.ndarray:
        g = self.chart.check(g)
        tau = self.chart.additive_coordinate(g)
        if self.kind == "diagonal_weights":
            return np.diag(np.exp(np.array(self.weights) * tau))
        if self.kind == "rotation":
            out = np.zeros((self.dim, self.dim))
            for i, f in enumerate(self.frequencies):
                c, s = math.cos(f * tau), math.sin(f * tau)
                out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[c, -s], [s, c]]
            return out
        if self.kind == "log_unipotent":
            return np.array([[1.0, -tau], [0.0, 1.0]])
        blocks = [part.matrix_at(g) for part in self.summands]
        out = np.zeros((self.dim, self.dim))
        offset = 0
        for b in blocks:
            n = b.shape[0]
            out[offset:offset + n, offset:offset + n] = b
            offset += n
        return out

    def orbit_of(self, v0: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Vectorized statistic map: row i is matrix_at(xs[i]) @ v0."""
        xs = np.asarray(xs, dtype=float)
        if self.chart.name == "positive_reals":
            if np.any(xs <= 0.0):
                raise DomainError("positive_reals parameters must be positive")
            tau = np.log(xs)
        else:
            tau = xs
        if self.kind == "diagonal_weights":
            # exp can overflow at extreme quadrature probes; a zero component
            # of v0 must still give a zero coordinate, not 0 * inf = nan
            with np.errstate(over="ignore"):
                grown = np.exp(tau[:, None] * np.array(self.weights)[None, :])
            out = grown * v0[None, :]
            out[:, np.asarray(v0) == 0.0] = 0.0
            return out
        if self.kind == "rotation":
            out = np.empty((xs.size, self.dim))
            for i, f in enumerate(self.frequencies):
                c, s = np.cos(f * tau), np.sin(f * tau)
                out[:, 2 * i] = c * v0[2 * i] - s * v0[2 * i + 1]
                out[:, 2 * i + 1] = s * v0[2 * i] + c * v0[2 * i + 1]
            return out
        if self.kind == "log_unipotent":
            out = np.empty((xs.size, 2))
            out[:, 0] = v0[0] - tau * v0[1]
            out[:, 1] = v0[1]
            return out
        if self.kind == "direct_sum":
            parts = []
            offset = 0
            for part in self.summands:
                parts.append(part.orbit_of(v0[offset:offset + part.dim], xs))
                offset += part.dim
            return np.concatenate(parts, axis=1)
        return np.stack([self.matrix_at(float(x)) @ v0 for x in xs])


def rep_eval(rep, g: float) -> np.ndarray:
    """Evaluate the representation at a chart parameter; always invertible."""
    return rep.matrix_at(g)


def dual_rep_eval(rep, g: float) -> np.ndarray:
    """Contragredient action: inverse transpose, so pairings are preserved
    when a covector moves by the dual and a vector by the inverse."""
    return np.linalg.inv(rep.matrix_at(g)).T


def validate_rep(rep, seed: int = 0, n_pairs: int = 8, tol: float = 1e-10) -> None:
    """Construction-time checks: identity, invertibility, homomorphism law.

    Residuals are measured relative to max(1, |rho(g g')|) so large diagonal
    weights do not fail on roundoff alone.
    """
    ch = rep.chart
    eye_err = np.max(np.abs(rep.matrix_at(ch.identity) - np.eye(rep.dim)))
    if eye_err > 1e-12:
        raise SpecError(f"template does not map the identity to I (residual {eye_err:.2e})")
    samples = sample_group(ch, n_pairs + 1, seed)[1:]
    pairs = list(zip(samples, sample_group(ch, n_pairs + 1, seed + 1)[1:]))
    for g in samples:
        m = rep.matrix_at(g)
        if abs(np.linalg.det(m)) < 1e-300:
            raise SpecError(f"template is singular at g={g}")
    for g, h in pairs:
        lhs = rep.matrix_at(g) @ rep.matrix_at(h)
        rhs = rep.matrix_at(ch.compose(g, h))
        resid = np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs)))
        if resid > tol:
            raise SpecError(
                f"homomorphism law fails at (g, g') = ({g}, {h}): residual {resid:.2e}")


def diagonal_weights(chart: GroupChart, weights: Sequence[float], seed: int = 0) -> RepSpec:
    if len(weights) == 0:
        raise SpecError("diagonal_weights needs at least one weight")
    rep = RepSpec(chart=chart, kind="diagonal_weights", weights=tuple(weights))
    validate_rep(rep, seed)
    return rep


def rotation(chart: GroupChart, frequencies: Sequence[float], seed: int = 0) -> RepSpec:
    if len(frequencies) == 0:
        raise SpecError("rotation needs at least one frequency")
    rep = RepSpec(chart=chart, kind="rotation", frequencies=tuple(frequencies))
    validate_rep(rep, seed)
    return rep


def log_unipotent(chart: GroupChart, seed: int = 0) -> RepSpec:
    rep = RepSpec(chart=chart, kind="log_unipotent")
    validate_rep(rep, seed)
    return rep


def direct_sum(summands: Sequence[RepSpec], seed: int = 0) -> RepSpec:
    if len(summands) == 0:
        raise SpecError("direct_sum needs at least one summand")
    charts = {part.chart.name for part in summands}
    if len(charts) != 1:
        raise SpecError(f"direct_sum summands live on different charts: {sorted(charts)}")
    rep = RepSpec(chart=summands[0].chart, kind="direct_sum", summands=tuple(summands))
    validate_rep(rep, seed)
    return rep


# ---------------------------------------------------------------------------
# group sampling
# ---------------------------------------------------------------------------

def sample_group(chart: GroupChart, n: int, seed: int) -> List[float]:
    """Deterministic list of n pairwise-distinct parameters; element 0 is the
    identity.  Collisions are resampled."""
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    rng = Rng(seed)
    out = [chart.identity]
    seen = {out[0]}
    while len(out) < n:
        g = chart.draw(rng)
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
    return out


# ---------------------------------------------------------------------------
# character bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterBasis:
    """Finitely many log-characters spanning the declared character space.

    ``power`` is the single log-character log g on the positive reals,
    ``linear`` the single log-character g on the real line, ``trivial`` the
    empty basis (the only choice on the circle, whose compactness leaves no
    nontrivial positive characters - declared, not computed).
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("power", "linear", "trivial"):
            raise SpecError(f"unknown character basis kind {self.kind!r}")

    @property
    def basis_size(self) -> int:
        return 0 if self.kind == "trivial" else 1

    def log_values(self, g: float) -> np.ndarray:
        if self.kind == "power":
            if g <= 0.0:
                raise DomainError(f"power characters need g > 0, got {g}")
            return np.array([math.log(g)])
        if self.kind == "linear":
            return np.array([float(g)])
        return np.zeros(0)

    def log_values_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == "power":
            if np.any(xs <= 0.0):
                raise DomainError("power characters need positive parameters")
            return np.log(xs)[:, None]
        if self.kind == "linear":
            return xs[:, None]
        return np.zeros((xs.size, 0))


TRIVIAL_CHARACTERS = CharacterBasis(kind="trivial")


@dataclass(frozen=True)
class CharacterValidation:
    valid: bool
    max_additivity_residual: float
    max_subgroup_residual: float
    offending_pair: Optional[Tuple[float, float]] = None
    offending_element: Optional[float] = None
    note: str = ""


def validate_character_basis(basis: CharacterBasis, chart: GroupChart,
                             subgroup: SubgroupSpec = TRIVIAL_SUBGROUP,
                             seed: int = 0, n_pairs: int = 32,
                             tol: float = 1e-10) -> CharacterValidation:
    """Check the declared basis on samples: vanishing on subgroup elements and
    additivity under the chart group law.

    For a declared parametric basis continuity is automatic; for anything
    user-extended, sampling is the only evidence available, which the note
    records.
    """
    if basis.kind == "trivial":
        return CharacterValidation(True, 0.0, 0.0, note="empty basis is vacuously valid")
    worst_h = 0.0
    bad_elem = None
    for h in subgroup.elements:
        try:
            resid = float(np.max(np.abs(basis.log_values(h)))) if basis.basis_size else 0.0
        except DomainError:
            resid = math.inf
        if resid > worst_h:
            worst_h, bad_elem = resid, h
    worst_pair = 0.0
    bad_pair = None
    gs = sample_group(chart, n_pairs + 1, seed)[1:]
    hs = sample_group(chart, n_pairs + 1, seed + 1)[1:]
    for g, h in zip(gs, hs):
        try:
            lhs = basis.log_values(chart.compose(g, h))
            rhs = basis.log_values(g) + basis.log_values(h)
            resid = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        except DomainError:
            resid = math.inf
        if resid > worst_pair:
            worst_pair, bad_pair = resid, (g, h)
    valid = worst_h <= tol and worst_pair <= tol
    return CharacterValidation(
        valid=valid,
        max_additivity_residual=worst_pair,
        max_subgroup_residual=worst_h,
        offending_pair=None if worst_pair <= tol else bad_pair,
        offending_element=None if worst_h <= tol else bad_elem,
        note="sampled check only; declared bases are continuous by construction",
    )

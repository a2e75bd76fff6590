"""Equivalence of generating pairs and the function-space correspondence.

Two pairs are equivalent when an invertible intertwiner maps one onto the
other, matching the distinguished vectors.  Equivalent pairs produce the same
span of sufficient statistics, hence the same family; both directions are
checked numerically here:

* ``pair_to_function_space`` realizes the span of matrix coefficients
  g -> <xi, rho(g) v0> on an evaluation grid;
* ``function_space_to_pair`` goes back, recovering the left-translation
  action on a declared function space by least squares and packaging its dual
  as a new pair whose distinguished vector is evaluation at the identity;
* ``find_equivalence`` solves the intertwiner equations over sampled group
  elements and validates the solution on fresh samples;
* ``same_family_check`` compares statistic spans directly, which can succeed
  even when no intertwiner is found - reported as such, never as an error.

Function spaces carry their basis callables: translates must be evaluated off
the grid, and a matrix of grid values alone cannot do that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .diagnostics import PairSpec, cyclic_check
from .errors import (
    GridTooSmallError,
    InvalidInputError,
    NotInvariantError,
    PreconditionError,
)
from .groupmodel import (
    GroupChart,
    SubgroupSpec,
    TRIVIAL_CHARACTERS,
    TRIVIAL_SUBGROUP,
    rep_eval,
    sample_group,
)
from .numkernel import as_vector, rank

_DEFAULT_GRID_SIZE = 16
_RESIDUAL_TOL = 1e-8


def default_grid(chart: GroupChart, size: int = _DEFAULT_GRID_SIZE) -> np.ndarray:
    """Evaluation grid: log-spaced over the sampling window for the positive
    reals, uniform otherwise (endpoints pulled inside for the circle)."""
    if chart.name == "positive_reals":
        return np.exp(np.linspace(-2.0, 2.0, size))
    if chart.name == "circle":
        return np.linspace(-math.pi + 1e-3, math.pi - 1e-3, size)
    return np.linspace(-3.0, 3.0, size)


@dataclass(frozen=True)
class FunctionSpaceSample:
    """A finite-dimensional function space held as callables plus grid values.

    ``basis_matrix[i, j] = functions[j](grid[i])``; the grid must oversample
    the space (at least twice its dimension) and resolve it to full rank.
    """

    grid: np.ndarray
    basis_matrix: np.ndarray
    functions: Tuple[Callable[[float], float], ...]

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        mat = np.asarray(self.basis_matrix, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "basis_matrix", mat)
        object.__setattr__(self, "functions", tuple(self.functions))
        k = len(self.functions)
        if mat.shape != (grid.size, k):
            raise InvalidInputError(
                f"basis matrix shape {mat.shape} does not match grid {grid.size} x {k}")
        if grid.size < 2 * k:
            raise GridTooSmallError(
                f"grid has {grid.size} points but the space has dimension {k}; "
                f"need at least {2 * k}")
        if rank(mat, 1e-9).rank != k:
            raise GridTooSmallError(
                "grid does not resolve the function space (rank-deficient values)")

    @property
    def dim(self) -> int:
        return len(self.functions)


def function_space(functions: Sequence[Callable[[float], float]],
                   grid: np.ndarray) -> FunctionSpaceSample:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    mat = np.array([[f(float(g)) for f in functions] for g in grid])
    return FunctionSpaceSample(grid=grid, basis_matrix=mat, functions=tuple(functions))


@dataclass(frozen=True)
class Intertwiner:
    """An invertible matrix commuting with both actions and matching the
    distinguished vectors, with the worst validation residual observed."""

    psi: np.ndarray
    residual: float


def matrix_coefficient(pair: PairSpec, xi, g: float) -> float:
    """The function value <xi, rho(g) v0>."""
    xi = as_vector(xi)
    if xi.size != pair.rep.dim:
        raise InvalidInputError(
            f"covector has {xi.size} entries, expected {pair.rep.dim}")
    return float(xi @ (rep_eval(pair.rep, g) @ pair.v0))


def pair_to_function_space(pair: PairSpec, grid=None) -> FunctionSpaceSample:
    """Span of the statistic coordinates g -> (rho(g) v0)_j on the grid.

    Requires a cyclic pair (otherwise the correspondence loses dimensions);
    a rank-deficient matrix on a cyclic pair means the grid is too small.
    """
    cyc, _ = cyclic_check(pair)
    if not cyc:
        raise PreconditionError(
            "pair is not cyclic: the function-space image would be degenerate")
    if grid is None:
        grid = default_grid(pair.chart)
    grid = np.asarray(grid, dtype=float).reshape(-1)
    mat = pair.rep.orbit_of(pair.v0, grid)
    dim = pair.rep.dim
    if rank(mat, 1e-9).rank != dim:
        raise GridTooSmallError(
            f"grid of size {grid.size} does not resolve the {dim}-dimensional "
            "statistic span; enlarge the grid")

    def coefficient(j):
        return lambda g: float(rep_eval(pair.rep, g)[j] @ pair.v0)

    return FunctionSpaceSample(grid=grid, basis_matrix=mat,
                               functions=tuple(coefficient(j) for j in range(dim)))


@dataclass(frozen=True)
class _LeastSquaresDualRep:
    """Dual of the left-translation action on a function space.

    ``matrix_at`` solves, on the grid, for the matrix expressing translated
    basis functions in the basis; the least-squares residual doubles as the
    certificate that the space is translation-invariant.  The dual action is
    the inverse transpose.
    """

    chart: GroupChart
    space: FunctionSpaceSample

    @property
    def dim(self) -> int:
        return self.space.dim

    def translation_matrix(self, g: float) -> np.ndarray:
        ch = self.chart
        g = ch.check(g)
        ginv = ch.inverse(g)
        translated = np.array([[f(ch.compose(ginv, float(x))) for f in self.space.functions]
                               for x in self.space.grid])
        sol, _, _, _ = np.linalg.lstsq(self.space.basis_matrix, translated, rcond=None)
        resid = np.linalg.norm(self.space.basis_matrix @ sol - translated)
        scale = max(1.0, np.linalg.norm(translated))
        if resid / scale > _RESIDUAL_TOL:
            raise NotInvariantError(
                f"translate by g={g} leaves the span on this grid "
                f"(relative residual {resid / scale:.2e}); the space is not "
                "translation-invariant as declared")
        return sol

    def matrix_at(self, g: float) -> np.ndarray:
        return np.linalg.inv(self.translation_matrix(g)).T

    def orbit_of(self, v0: np.ndarray, xs) -> np.ndarray:
        return np.stack([self.matrix_at(float(x)) @ v0 for x in np.asarray(xs, dtype=float)])


def function_space_to_pair(space: FunctionSpaceSample, chart: GroupChart,
                           action_samples: Sequence[float]) -> PairSpec:
    """Package the dual of the translation action as a new generating pair.

    The distinguished vector is evaluation at the identity, written in the
    coordinates dual to the declared basis; it is always cyclic for the dual
    action, which the test suite verifies.  Raises when some sampled
    translate is not expressible in the basis on the grid.
    """
    rep = _LeastSquaresDualRep(chart=chart, space=space)
    for g in action_samples:
        rep.translation_matrix(float(g))  # residual certificate for each sample
    v0 = np.array([f(chart.identity) for f in space.functions])
    return PairSpec(rep=rep, v0=v0, chart=chart,
                    subgroup=TRIVIAL_SUBGROUP, characters=TRIVIAL_CHARACTERS)


def find_equivalence(pair1: PairSpec, pair2: PairSpec,
                     n_samples: int = 32, seed: int = 0) -> Optional[Intertwiner]:
    """Search for an invertible intertwiner psi with psi v0 = v0'.

    Solves the homogeneous commutation system over sampled group elements,
    then picks, inside the affine slice fixed by the vector constraint, the
    solution of least Frobenius norm.  Singular candidates and constraint
    residuals mean "no equivalence found" (None), not an error; non-cyclic
    inputs are a precondition violation.
    """
    for name, pair in (("first", pair1), ("second", pair2)):
        cyc, _ = cyclic_check(pair)
        if not cyc:
            raise PreconditionError(
                f"{name} pair is not cyclic; equivalence is defined on cyclic pairs")
    if pair1.chart.name != pair2.chart.name:
        raise PreconditionError("pairs live on different charts")
    d1, d2 = pair1.rep.dim, pair2.rep.dim
    if d1 != d2:
        return None

    gs = sample_group(pair1.chart, n_samples, seed)[1:]
    blocks = []
    eye1, eye2 = np.eye(d1), np.eye(d2)
    for g in gs:
        m1 = rep_eval(pair1.rep, g)
        m2 = rep_eval(pair2.rep, g)
        scale = max(1.0, float(np.max(np.abs(m1))), float(np.max(np.abs(m2))))
        blocks.append((np.kron(m1.T, eye2) - np.kron(eye1, m2)) / scale)
    stacked = np.vstack(blocks)
    # after normalization genuine constraints have O(1) rows, so the rank
    # threshold is floored at 1: an all-roundoff system must read as zero
    _, svals, vt = np.linalg.svd(stacked)
    threshold = 1e-9 * max(float(svals[0]) if svals.size else 0.0, 1.0)
    n_constraints = int(np.sum(svals > threshold))
    basis = [vt[i] for i in range(n_constraints, d1 * d2)]
    if not basis:
        return None
    mats = [vec.reshape(d2, d1, order="F") for vec in basis]

    # affine constraint psi v0 = v0' in the intertwiner coordinates
    constraint = np.column_stack([m @ pair1.v0 for m in mats])
    coeffs, _, _, _ = np.linalg.lstsq(constraint, pair2.v0, rcond=None)
    resid = np.linalg.norm(constraint @ coeffs - pair2.v0)
    if resid > _RESIDUAL_TOL * max(1.0, np.linalg.norm(pair2.v0)):
        return None
    psi = sum(c * m for c, m in zip(coeffs, mats))
    if rank(psi, 1e-9).rank != d1:
        return None

    worst = float(np.linalg.norm(psi @ pair1.v0 - pair2.v0))
    for g in sample_group(pair1.chart, 9, seed + 65537)[1:]:
        delta = psi @ rep_eval(pair1.rep, g) - rep_eval(pair2.rep, g) @ psi
        worst = max(worst, float(np.max(np.abs(delta))))
    if worst > _RESIDUAL_TOL:
        return None
    return Intertwiner(psi=psi, residual=worst)


def _mutual_span_residual(b1: np.ndarray, b2: np.ndarray) -> float:
    q1, _ = np.linalg.qr(b1)
    q2, _ = np.linalg.qr(b2)
    r12 = np.linalg.norm(b2 - q1 @ (q1.T @ b2)) / max(1.0, np.linalg.norm(b2))
    r21 = np.linalg.norm(b1 - q2 @ (q2.T @ b1)) / max(1.0, np.linalg.norm(b1))
    return max(r12, r21)


def same_family_check(pair1: PairSpec, pair2: PairSpec, grid=None) -> bool:
    """True when both pairs span the same statistics on the grid (mutual
    projection residual at most 1e-8)."""
    if pair1.chart.name != pair2.chart.name:
        raise PreconditionError("pairs live on different charts")
    if pair1.subgroup.elements != pair2.subgroup.elements:
        raise PreconditionError("pairs declare different subgroups")
    if grid is None:
        grid = default_grid(pair1.chart)
    w1 = pair_to_function_space(pair1, grid)
    w2 = pair_to_function_space(pair2, grid)
    return bool(_mutual_span_residual(w1.basis_matrix, w2.basis_matrix) <= _RESIDUAL_TOL)


def right_fixed_check(space: FunctionSpaceSample, chart: GroupChart,
                      subgroup: SubgroupSpec, tol: float = 1e-10) -> bool:
    """True when every basis function is unchanged by right translation with
    each subgroup element, evaluated through the chart group law."""
    if subgroup.kind == "trivial" or not subgroup.elements:
        return True
    for h in subgroup.elements:
        moved = np.array([[f(chart.compose(float(x), h)) for f in space.functions]
                          for x in space.grid])
        if np.max(np.abs(moved - space.basis_matrix)) > tol * max(
                1.0, float(np.max(np.abs(space.basis_matrix)))):
            return False
    return True

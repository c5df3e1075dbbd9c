"""Perron-Frobenius spectral data for positive edge functions.

For a positive function f on the edge set, the weight matrix A(f) is
irreducible (the graph is strongly connected), so it has a simple dominant
positive eigenvalue r(f) with positive left/right eigenvectors. The solver is
power iteration on the shifted matrix A + cI with c = 1 + max diagonal entry;
the positive diagonal makes the shifted matrix primitive, so the iteration
converges even for periodic structures such as a pure cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryFunction, GraphMismatch, NoConvergence, NonpositiveScale
from .graph import ChainGraph

__all__ = ["EdgeFunction", "SpectralData", "matrix_of", "perron", "root_derivative", "scale"]

_POWER_TOL = 1e-14
_POWER_BUDGET = 10**6


@dataclass(frozen=True)
class EdgeFunction:
    """A real-valued function on the edge set, in canonical edge order.

    Strictly positive unless boundary=True (row-normalized count estimates may
    sit on the boundary of the positive cone; such objects are rejected by
    every spectral or divergence operation).
    """

    graph: ChainGraph
    values: np.ndarray
    boundary: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.graph.num_edges,):
            raise ValueError(f"expected {self.graph.num_edges} values, got shape {values.shape}")
        if self.boundary:
            if np.any(values < 0):
                raise ValueError("edge values must be nonnegative")
        elif np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ValueError("edge values must be strictly positive and finite")

    def value_at(self, x: int, y: int) -> float:
        return float(self.values[self.graph.edge_index[(x, y)]])


@dataclass(frozen=True)
class SpectralData:
    """Perron-Frobenius root with left/right eigenvectors normalized to sum 1."""

    root: float
    left_vec: np.ndarray = field(repr=False)
    right_vec: np.ndarray = field(repr=False)


def _require_interior(f: EdgeFunction):
    if f.boundary:
        raise BoundaryFunction("operation requires a strictly positive edge function")


def require_same_graph(*objects):
    first = objects[0].graph
    for other in objects[1:]:
        if other.graph != first:
            raise GraphMismatch("inputs live on different graphs")
    return first


def matrix_of(f: EdgeFunction) -> np.ndarray:
    """Dense weight matrix: entry (i, j) is f(i, j) on edges, 0 elsewhere."""
    g = f.graph
    a = np.zeros((g.num_states, g.num_states))
    a[g.sources, g.targets] = f.values
    return a


def _power_iterate(matrix):
    """Dominant eigenvalue/eigenvector of a primitive nonnegative matrix."""
    n = matrix.shape[0]
    vec = np.full(n, 1.0 / n)
    for _ in range(_POWER_BUDGET):
        nxt = matrix @ vec
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - vec)) < _POWER_TOL:
            vec = nxt
            break
        vec = nxt
    else:
        raise NoConvergence("power iteration budget exhausted")
    # vec sums to 1, so the eigenvalue is the total mass of matrix @ vec
    return float((matrix @ vec).sum()), vec


def perron(f: EdgeFunction) -> SpectralData:
    """Perron-Frobenius root and positive eigenvectors of A(f)."""
    _require_interior(f)
    a = matrix_of(f)
    shift = 1.0 + float(a.diagonal().max())
    shifted = a + shift * np.eye(a.shape[0])
    root_shifted, right = _power_iterate(shifted)
    _, left = _power_iterate(shifted.T)
    return SpectralData(root=root_shifted - shift, left_vec=left, right_vec=right)


def root_derivative(f: EdgeFunction, edge: tuple[int, int]) -> float:
    """Partial derivative of the root with respect to the weight on one edge.

    First-order eigenvalue perturbation: d r / d A_st = mu_s v_t / (mu . v).
    """
    s, t = edge
    if (s, t) not in f.graph.edge_index:
        raise KeyError(f"({s}, {t}) is not an edge")
    sd = perron(f)
    return float(sd.left_vec[s] * sd.right_vec[t] / (sd.left_vec @ sd.right_vec))


def root_gradient(f: EdgeFunction, spectral: SpectralData | None = None) -> np.ndarray:
    """All edge partials of the root at once, in canonical edge order."""
    sd = spectral if spectral is not None else perron(f)
    g = f.graph
    return sd.left_vec[g.sources] * sd.right_vec[g.targets] / (sd.left_vec @ sd.right_vec)


def scale(f: EdgeFunction, a: float) -> EdgeFunction:
    """Pointwise rescaling; multiplies the root by a, leaves mu_f unchanged."""
    if not a > 0:
        raise NonpositiveScale(f"scale factor must be positive, got {a}")
    return EdgeFunction(f.graph, a * f.values)

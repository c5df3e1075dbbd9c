"""Coordinate charts between positive edge functions and expectation points.

The forward chart sends f to eta with eta_xy = mu_f(x) f(x, y); its closed-form
inverse is f(x, y) = mass(eta) * eta_xy / eta^x where eta^x is the incoming
marginal. Membership predicates identify the transition-probability set W
(unit row sums), the positive-transition-measure hypersurface (root 1), the
normalized section (mass 1), and the stationary simplex slice M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeState
from .graph import ChainGraph
from .spectral import EdgeFunction, perron

__all__ = [
    "ExpectationPoint",
    "mass",
    "in_marginal",
    "out_marginal",
    "in_marginals",
    "out_marginals",
    "tbar",
    "taubar",
    "is_transition_probability",
    "is_positive_transition_measure",
    "normalize_to_measure",
    "is_in_M",
    "is_in_Mtilde",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ExpectationPoint:
    """A positive point in expectation coordinates, canonical edge order."""

    graph: ChainGraph
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.graph.num_edges,):
            raise ValueError(f"expected {self.graph.num_edges} values, got shape {values.shape}")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ValueError("expectation coordinates must be strictly positive and finite")


def mass(eta: ExpectationPoint) -> float:
    """Total mass: the sum of all coordinates."""
    return float(eta.values.sum())


def in_marginals(eta: ExpectationPoint) -> np.ndarray:
    """Incoming sums eta^x for every state at once."""
    out = np.zeros(eta.graph.num_states)
    np.add.at(out, eta.graph.targets, eta.values)
    return out


def out_marginals(eta: ExpectationPoint) -> np.ndarray:
    """Outgoing sums eta_x for every state at once."""
    out = np.zeros(eta.graph.num_states)
    np.add.at(out, eta.graph.sources, eta.values)
    return out


def _check_state(eta, x):
    if not 0 <= x < eta.graph.num_states:
        raise OutOfRangeState(f"state {x} outside [0, {eta.graph.num_states})")


def in_marginal(eta: ExpectationPoint, x: int) -> float:
    _check_state(eta, x)
    return float(in_marginals(eta)[x])


def out_marginal(eta: ExpectationPoint, x: int) -> float:
    _check_state(eta, x)
    return float(out_marginals(eta)[x])


def tbar(f: EdgeFunction) -> ExpectationPoint:
    """Forward chart: eta_xy = mu_f(x) f(x, y)."""
    mu = perron(f).left_vec
    return ExpectationPoint(f.graph, mu[f.graph.sources] * f.values)


def taubar(eta: ExpectationPoint) -> EdgeFunction:
    """Inverse chart: f(x, y) = mass(eta) * eta_xy / eta^x."""
    eta_in = in_marginals(eta)
    return EdgeFunction(eta.graph, mass(eta) * eta.values / eta_in[eta.graph.sources])


def is_transition_probability(f: EdgeFunction, tol: float = DEFAULT_TOL) -> bool:
    """Membership in W: every outgoing row sum equals 1."""
    rows = np.zeros(f.graph.num_states)
    np.add.at(rows, f.graph.sources, f.values)
    return bool(np.max(np.abs(rows - 1.0)) <= tol)


def is_positive_transition_measure(f: EdgeFunction, tol: float = DEFAULT_TOL) -> bool:
    """Membership in the root-one hypersurface of positive transition measures."""
    return abs(perron(f).root - 1.0) <= tol


def normalize_to_measure(f: EdgeFunction) -> EdgeFunction:
    """Radial retraction f / r(f) onto the root-one hypersurface."""
    return EdgeFunction(f.graph, f.values / perron(f).root)


def is_in_Mtilde(eta: ExpectationPoint, tol: float = DEFAULT_TOL) -> bool:
    """Normalization condition only: total mass 1."""
    return abs(mass(eta) - 1.0) <= tol


def is_in_M(eta: ExpectationPoint, tol: float = DEFAULT_TOL) -> bool:
    """Mass 1 and stationarity: outgoing and incoming marginals agree at every state."""
    if not is_in_Mtilde(eta, tol):
        return False
    return bool(np.max(np.abs(out_marginals(eta) - in_marginals(eta))) <= tol)


def scale_point(eta: ExpectationPoint, a: float) -> ExpectationPoint:
    """Pointwise rescaling of an expectation point."""
    if not a > 0:
        raise ValueError(f"scale factor must be positive, got {a}")
    return ExpectationPoint(eta.graph, a * eta.values)


__all__.append("scale_point")

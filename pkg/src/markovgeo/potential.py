"""The convex potential on expectation points and its derivatives.

phibar(eta) = sum_xy eta_xy log eta_xy - sum_x eta_x log eta^x, where eta_x and
eta^x are the outgoing and incoming marginals. It is homogeneous of degree 1,
so its Hessian annihilates the radial vector eta; restricted to the mass-one
section it is positive definite. phihat is the closely related variant that
uses the outgoing marginal inside the logarithm as well.
"""

from __future__ import annotations

import numpy as np

from .coordinates import ExpectationPoint, in_marginals, is_in_Mtilde, out_marginals
from .errors import NotInMtilde

__all__ = ["phibar", "phibar_gradient", "phibar_hessian", "restricted_hessian", "phihat"]


def phibar(eta: ExpectationPoint) -> float:
    v = eta.values
    return float(v @ np.log(v)) - float(out_marginals(eta) @ np.log(in_marginals(eta)))


def phihat(eta: ExpectationPoint) -> float:
    v = eta.values
    eta_out = out_marginals(eta)
    return float(v @ np.log(v)) - float(eta_out @ np.log(eta_out))


def phibar_gradient(eta: ExpectationPoint) -> np.ndarray:
    """Per-edge partials: log eta_xy - log eta^x - eta_y/eta^y + 1."""
    g = eta.graph
    eta_in = in_marginals(eta)
    eta_out = out_marginals(eta)
    return np.log(eta.values) - np.log(eta_in[g.sources]) - (eta_out / eta_in)[g.targets] + 1.0


def phibar_hessian(eta: ExpectationPoint) -> np.ndarray:
    """Dense Hessian assembled from the closed-form entry expression.

    Entry ((s,t),(u,v)):
        kron(st,uv)/eta_st - kron(s,v)/eta^s - (kron(t,u) eta^t - kron(t,v) eta_t)/(eta^t)^2
    The matrix is explicitly symmetrized after assembly; asymmetry beyond
    1e-10 of the largest entry indicates an assembly bug and raises.
    """
    g = eta.graph
    n = g.num_edges
    v = eta.values
    eta_in = in_marginals(eta)
    eta_out = out_marginals(eta)
    h = np.zeros((n, n))
    for i, (s, t) in enumerate(g.edges):
        for j, (u, w) in enumerate(g.edges):
            entry = 0.0
            if i == j:
                entry += 1.0 / v[i]
            if s == w:
                entry -= 1.0 / eta_in[s]
            if t == u:
                entry -= 1.0 / eta_in[t]
            if t == w:
                entry += eta_out[t] / eta_in[t] ** 2
            h[i, j] = entry
    asymmetry = np.max(np.abs(h - h.T))
    if asymmetry > 1e-10 * max(np.max(np.abs(h)), 1.0):
        raise RuntimeError(f"Hessian assembly asymmetry {asymmetry}")
    return 0.5 * (h + h.T)


def restricted_hessian(eta: ExpectationPoint, eliminated_edge=None, tol: float = 1e-9) -> np.ndarray:
    """Hessian pulled back to the mass-one section's affine chart.

    The chart keeps every coordinate except eliminated_edge (default: the
    lexicographically last edge), which is recovered from the normalization
    condition. The result is symmetric positive definite.
    """
    if not is_in_Mtilde(eta, tol):
        raise NotInMtilde("restricted Hessian requires a point of total mass 1")
    g = eta.graph
    if eliminated_edge is None:
        eliminated = g.num_edges - 1
    else:
        eliminated = g.edge_index[tuple(eliminated_edge)]
    keep = [k for k in range(g.num_edges) if k != eliminated]
    h = phibar_hessian(eta)
    return (
        h[np.ix_(keep, keep)]
        - h[keep, eliminated][:, None]
        - h[eliminated, keep][None, :]
        + h[eliminated, eliminated]
    )

"""Divergences on positive edge functions and expectation points.

The F-divergence of two positive edge functions compares them after radial
normalization by their dominant roots, weighted by the stationary pair measure
of the first argument. With the log generator it coincides with the Bregman
divergence of the explicit potential on expectation points, and on the
transition-probability set it reduces to the classical relative entropy rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coordinates import ExpectationPoint, in_marginals, mass, out_marginals, is_transition_probability
from .errors import GeneratorInvalid, GraphMismatch, NotTransitionProbability
from .spectral import EdgeFunction, perron, require_same_graph, root_gradient

__all__ = [
    "StandardConvexFunction",
    "builtin_generators",
    "register_generator",
    "get_generator",
    "generator_names",
    "f_divergence",
    "nagaoka_divergence",
    "bregman_divergence",
    "induced_tensor",
    "induced_tensor_gram",
    "null_space_dimension",
]

# results in [_CLAMP, 0) report as 0 so nonnegativity stays contractual
_CLAMP = -1e-12


@dataclass(frozen=True)
class StandardConvexFunction:
    """A strictly convex generator on (0, inf) normalized at t = 1."""

    name: str
    eval: Callable[[float], float]
    deriv1: Callable[[float], float]
    deriv2: Callable[[float], float]

    def __call__(self, t):
        return self.eval(t)


def _validate_generator(gen: StandardConvexFunction):
    for label, value in (("F(1)", gen.eval(1.0)), ("F'(1)", gen.deriv1(1.0))):
        if abs(value) > 1e-12:
            raise GeneratorInvalid(f"{gen.name}: {label} = {value}, expected 0")
    if abs(gen.deriv2(1.0) - 1.0) > 1e-12:
        raise GeneratorInvalid(f"{gen.name}: F''(1) = {gen.deriv2(1.0)}, expected 1")
    grid = [2.0**k for k in range(-6, 7)]
    for t in grid:
        if not gen.deriv2(t) > 0:
            raise GeneratorInvalid(f"{gen.name}: F''({t}) = {gen.deriv2(t)} is not positive")
        h = 1e-6 * t
        fd1 = (gen.eval(t + h) - gen.eval(t - h)) / (2 * h)
        fd2 = (gen.deriv1(t + h) - gen.deriv1(t - h)) / (2 * h)
        scale1 = max(abs(gen.deriv1(t)), 1e-3)
        scale2 = max(abs(gen.deriv2(t)), 1e-3)
        if abs(fd1 - gen.deriv1(t)) > 1e-6 * scale1:
            raise GeneratorInvalid(f"{gen.name}: F' inconsistent with F near t = {t}")
        if abs(fd2 - gen.deriv2(t)) > 1e-6 * scale2:
            raise GeneratorInvalid(f"{gen.name}: F'' inconsistent with F' near t = {t}")


_KL = StandardConvexFunction(
    name="kl",
    eval=lambda t: -math.log(t) + (t - 1.0),
    deriv1=lambda t: 1.0 - 1.0 / t,
    deriv2=lambda t: 1.0 / t**2,
)
_CHI2 = StandardConvexFunction(
    name="chi2",
    eval=lambda t: 0.5 * (t - 1.0) ** 2,
    deriv1=lambda t: t - 1.0,
    deriv2=lambda t: 1.0,
)
_HELLINGER = StandardConvexFunction(
    name="hellinger",
    eval=lambda t: 2.0 * (math.sqrt(t) - 1.0) ** 2,
    deriv1=lambda t: 2.0 - 2.0 / math.sqrt(t),
    deriv2=lambda t: t**-1.5,
)

_REGISTRY: dict[str, StandardConvexFunction] = {}


def register_generator(gen: StandardConvexFunction) -> StandardConvexFunction:
    """Validate a generator and add it to the registry. Names are write-once."""
    if gen.name in _REGISTRY:
        raise GeneratorInvalid(f"generator {gen.name!r} already registered")
    _validate_generator(gen)
    _REGISTRY[gen.name] = gen
    return gen


for _gen in (_KL, _CHI2, _HELLINGER):
    register_generator(_gen)


def builtin_generators() -> list[StandardConvexFunction]:
    return [_KL, _CHI2, _HELLINGER]


def get_generator(name: str) -> StandardConvexFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown generator {name!r}; known: {sorted(_REGISTRY)}") from None


def generator_names() -> list[str]:
    return sorted(_REGISTRY)


def _clamp(value: float) -> float:
    return 0.0 if _CLAMP <= value < 0.0 else value


def f_divergence(gen: StandardConvexFunction, f: EdgeFunction, g: EdgeFunction) -> float:
    """D_F of two positive edge functions; zero exactly on rays g = a f."""
    graph = require_same_graph(f, g)
    sd_f, sd_g = perron(f), perron(g)
    ratio = (g.values / sd_g.root) / (f.values / sd_f.root)
    weights = sd_f.left_vec[graph.sources] * f.values
    value = float(weights @ np.array([gen.eval(t) for t in ratio]))
    return _clamp(value)


def nagaoka_divergence(w1: EdgeFunction, w2: EdgeFunction, tol: float = 1e-9) -> float:
    """Relative entropy rate between two transition probabilities."""
    graph = require_same_graph(w1, w2)
    for w in (w1, w2):
        if not is_transition_probability(w, tol):
            raise NotTransitionProbability("inputs must have unit row sums")
    mu = perron(w1).left_vec
    weights = mu[graph.sources] * w1.values
    value = float(weights @ np.log(w1.values / w2.values))
    return _clamp(value)


def bregman_divergence(eta: ExpectationPoint, zeta: ExpectationPoint) -> float:
    """Bregman divergence of the potential on expectation points (closed form)."""
    if eta.graph != zeta.graph:
        raise GraphMismatch("inputs live on different graphs")
    eta_in, eta_out = in_marginals(eta), out_marginals(eta)
    zeta_in, zeta_out = in_marginals(zeta), out_marginals(zeta)
    value = (
        float(eta.values @ np.log(eta.values / zeta.values))
        - float(eta_out @ np.log(eta_in / zeta_in))
        + float(eta_in @ (zeta_out / zeta_in))
        - mass(eta)
    )
    return _clamp(value)


def _normalized_coordinate_jacobian(f: EdgeFunction, spectral) -> np.ndarray:
    """Jacobian of a |-> a / r(a) at f: rows indexed by (x, y), columns by (s, t)."""
    n = f.graph.num_edges
    r = spectral.root
    dr = root_gradient(f, spectral)
    return (r * np.eye(n) - np.outer(f.values, dr)) / r**2


def _tensor_weights(f: EdgeFunction, spectral) -> np.ndarray:
    # second derivative of F(u) through the normalized ratio u contributes the
    # chain factor (r / f_xy)^2 on top of the pair-measure weight mu_f(x) f_xy
    return spectral.left_vec[f.graph.sources] * spectral.root**2 / f.values


def induced_tensor(gen: StandardConvexFunction, f: EdgeFunction, x_vec, y_vec) -> float:
    """Symmetric bilinear form induced on tangent vectors at f.

    The value is generator independent: the second-derivative normalization at
    t = 1 makes every admissible generator induce the same tensor.
    """
    x_vec = np.asarray(x_vec, dtype=float)
    y_vec = np.asarray(y_vec, dtype=float)
    if x_vec.shape != (f.graph.num_edges,) or y_vec.shape != (f.graph.num_edges,):
        raise GraphMismatch("tangent vectors must be edge-indexed on the same graph")
    del gen
    sd = perron(f)
    jac = _normalized_coordinate_jacobian(f, sd)
    weights = _tensor_weights(f, sd)
    return float((jac @ x_vec) @ (weights * (jac @ y_vec)))


def induced_tensor_gram(gen: StandardConvexFunction, f: EdgeFunction) -> np.ndarray:
    """Gram matrix of the induced tensor in the coordinate basis."""
    del gen
    sd = perron(f)
    jac = _normalized_coordinate_jacobian(f, sd)
    return jac.T @ (_tensor_weights(f, sd)[:, None] * jac)


def null_space_dimension(gen: StandardConvexFunction, f: EdgeFunction, tol: float = 1e-9) -> int:
    """Number of near-zero eigenvalues of the induced-tensor Gram matrix."""
    eigenvalues = np.linalg.eigvalsh(induced_tensor_gram(gen, f))
    return int(np.count_nonzero(np.abs(eigenvalues) <= tol * eigenvalues.max()))

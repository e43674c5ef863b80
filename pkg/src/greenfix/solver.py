"""Discretised integral operator and damped Picard iteration.

The operator is

    (F v)_j(t) = -int_0^T G(t, s) f_j(s, v(s)) ds,

whose fixed points solve ``v'' + v = f(t, v)`` with ``v(0) = v(T) = 0``.
Each integral is split at ``s = t`` because the kernel has a derivative
jump on the diagonal; on each side the integrand is a smooth branch
formula times ``f``.  The quadrature is assembled once into a dense
matrix so one application is a single matrix product per iteration.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import MeshMismatch, NoConvergence
from .kernel import ABOVE, BELOW, GreenKernel
from .quadrature import composite_weights, gauss_legendre_nodes, one_step_weights
from .seqspace import LpParams, TruncatedState, column_norms, sup_norm

log = logging.getLogger(__name__)

SIMPSON = "simpson"
GAUSS = "gauss"


@dataclass(frozen=True)
class SolverConfig:
    J: int = 15
    M: int = 201
    quadrature: str = SIMPSON
    gauss_order: int = 4
    tol: float = 1e-10
    max_iter: int = 200
    relaxation: float = 1.0
    initial: Optional[TruncatedState] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if self.J < 1:
            raise ValueError("J must be >= 1")
        if self.M < 3:
            raise ValueError("M must be >= 3")
        if self.quadrature not in (SIMPSON, GAUSS):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        if self.quadrature == SIMPSON and self.M % 2 == 0:
            raise ValueError("Simpson quadrature needs an odd number of mesh points")
        if self.gauss_order < 1:
            raise ValueError("gauss_order must be >= 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")

    def mesh(self, T):
        return np.linspace(0.0, T, self.M)


@dataclass
class Discretization:
    """Quadrature for ``t_m -> int_0^T K(t_m, s) phi(s) ds`` on a fixed mesh.

    ``weights[m] @ phi(nodes)`` approximates the integral.  For Simpson the
    nodes are the mesh itself; for Gauss-Legendre they are interior points
    of every mesh interval and state values there come from a cubic spline.
    """

    mesh: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    interpolated: bool

    def node_values(self, values):
        if not self.interpolated:
            return values
        return CubicSpline(self.mesh, values, axis=1)(self.nodes)


def _simpson_matrix(kernel, mesh, derivative):
    M = mesh.size
    h = mesh[1] - mesh[0]
    W = np.zeros((M, M))
    for m in range(M):
        t = mesh[m]
        # s < t: the "above" branch (t > s)
        if m == 1:
            idx = np.array([0, 1, 2])
            W[m, idx] += one_step_weights(h) * kernel.branch(t, mesh[idx], ABOVE, derivative)
        elif m >= 2:
            idx = np.arange(0, m + 1)
            W[m, idx] += composite_weights(m, h) * kernel.branch(t, mesh[idx], ABOVE, derivative)
        # s > t: the "below" branch
        n_right = M - 1 - m
        if n_right == 1:
            idx = np.array([M - 1, M - 2, M - 3])
            W[m, idx] += one_step_weights(h) * kernel.branch(t, mesh[idx], BELOW, derivative)
        elif n_right >= 2:
            idx = np.arange(m, M)
            W[m, idx] += composite_weights(n_right, h) * kernel.branch(t, mesh[idx], BELOW, derivative)
    return W


def _gauss_matrix(kernel, mesh, order, derivative):
    nodes, w = gauss_legendre_nodes(mesh, order)
    t = mesh[:, None]
    s = nodes[None, :]
    # Gauss nodes never coincide with mesh points, so the split is exact
    vals = np.where(
        s < t,
        kernel.branch(t, s, ABOVE, derivative),
        kernel.branch(t, s, BELOW, derivative),
    )
    return nodes, vals * w[None, :]


@lru_cache(maxsize=16)
def discretize(kernel: GreenKernel, M: int, quadrature: str, gauss_order: int = 4, derivative: int = 0):
    mesh = np.linspace(0.0, kernel.T, M)
    if quadrature == SIMPSON:
        W = _simpson_matrix(kernel, mesh, derivative)
        disc = Discretization(mesh, mesh, W, interpolated=False)
    else:
        nodes, W = _gauss_matrix(kernel, mesh, gauss_order, derivative)
        disc = Discretization(mesh, nodes, W, interpolated=True)
    disc.weights.setflags(write=False)
    return disc


def _check_mesh(state, kernel, cfg):
    if state.M != cfg.M or state.T != kernel.T:
        raise MeshMismatch(
            f"state mesh (M={state.M}, T={state.T}) does not match config (M={cfg.M}, T={kernel.T})"
        )
    if not np.array_equal(state.mesh, cfg.mesh(kernel.T)):
        raise MeshMismatch("state mesh is not the uniform configured mesh")


def forcing_at_nodes(spec, disc, values):
    return spec.evaluate(disc.nodes, disc.node_values(values))


def apply_operator(spec, kernel, state, cfg):
    """One application of ``F`` to a truncated state on the configured mesh."""
    _check_mesh(state, kernel, cfg)
    disc = discretize(kernel, cfg.M, cfg.quadrature, cfg.gauss_order)
    f = forcing_at_nodes(spec, disc, state.values)
    out = -(f @ disc.weights.T)
    out[:, 0] = 0.0
    out[:, -1] = 0.0
    return TruncatedState(state.mesh, out + 0.0)


def operator_second_derivative(spec, kernel, state, cfg):
    """``d^2/dt^2 (F v)`` at the mesh points from the explicit derivative formulas.

    The integral part uses the branchwise second t-derivatives of the kernel;
    the point term comes from the jump of the one-sided first derivative on
    the diagonal.
    """
    _check_mesh(state, kernel, cfg)
    disc = discretize(kernel, cfg.M, cfg.quadrature, cfg.gauss_order, derivative=2)
    f_nodes = forcing_at_nodes(spec, disc, state.values)
    integral = f_nodes @ disc.weights.T
    t = state.mesh
    jump = kernel.dt_onesided(t, t, ABOVE) - kernel.dt_onesided(t, t, BELOW)
    f_mesh = spec.evaluate(t, state.values)
    return -(integral + jump[None, :] * f_mesh)


@dataclass
class SolveResult:
    state: TruncatedState
    iterations: int
    converged: bool
    iterate_deltas: np.ndarray
    sup_norm: float
    truncation_error_bound: float
    warnings: list = field(default_factory=list)
    relaxation: float = 1.0
    radius: Optional[float] = None
    within_radius: Optional[bool] = None

    def to_json(self):
        return {
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "iterate_deltas": [float(d) for d in self.iterate_deltas],
            "sup_norm": float(self.sup_norm),
            "truncation_error_bound": float(self.truncation_error_bound),
            "warnings": list(self.warnings),
            "relaxation": float(self.relaxation),
            "radius": None if self.radius is None else float(self.radius),
            "within_radius": self.within_radius,
            "J": int(self.state.J),
            "M": int(self.state.M),
            "T": float(self.state.T),
        }


def truncation_error_bound(spec, kernel, state, radius):
    """Bound on the effect of the dropped components ``k > J`` on ``F v``.

    ``radius`` bounds the magnitude of every dropped component.
    """
    tail = spec.component_tail_bound(state.J, state.mesh, radius)
    return float(kernel.T * abs(kernel.bound()) * np.max(tail, initial=0.0))


def solve(spec, kernel, cfg, params=None, radius=None, strict=False):
    """Damped Picard iteration ``v <- (1 - w) v + w F(v)`` from the initial state.

    Stops when the sup-norm change between iterates is at most ``cfg.tol``.
    If the change grows for three consecutive iterations the relaxation
    weight drops to 0.5 once.  With ``strict=True`` a failure to converge
    raises :class:`NoConvergence`; otherwise the result is returned with
    ``converged=False``.
    """
    params = params or LpParams()
    mesh = cfg.mesh(kernel.T)
    if cfg.initial is not None:
        state = cfg.initial.copy()
        _check_mesh(state, kernel, cfg)
        if state.J != cfg.J:
            raise MeshMismatch(f"initial state has J={state.J}, config J={cfg.J}")
    else:
        state = TruncatedState.zeros(mesh, cfg.J)

    omega = cfg.relaxation
    warnings = []
    if cfg.quadrature == GAUSS:
        warnings.append("gauss quadrature: f evaluated on cubic-spline interpolated state")
    deltas = []
    growth = 0
    converged = False
    for it in range(1, cfg.max_iter + 1):
        image = apply_operator(spec, kernel, state, cfg)
        new = image.values if omega == 1.0 else (1.0 - omega) * state.values + omega * image.values
        delta = float(np.max(column_norms(new - state.values, params)))
        deltas.append(delta)
        log.debug("iteration %d: delta %.3e", it, delta)
        if not np.isfinite(delta):
            warnings.append(f"iterate diverged at iteration {it}")
            break
        state = TruncatedState(mesh, new)
        if delta <= cfg.tol:
            converged = True
            break
        growth = growth + 1 if len(deltas) > 1 and delta > deltas[-2] else 0
        if growth >= 3 and omega > 0.5:
            omega = 0.5
            growth = 0
            warnings.append(f"relaxation reduced to 0.5 at iteration {it}")

    norm = sup_norm(state, params)
    bound_radius = radius if radius is not None else norm
    result = SolveResult(
        state=state,
        iterations=len(deltas),
        converged=converged,
        iterate_deltas=np.array(deltas),
        sup_norm=norm,
        truncation_error_bound=truncation_error_bound(spec, kernel, state, bound_radius),
        warnings=warnings,
        relaxation=omega,
        radius=radius,
        within_radius=None if radius is None else bool(norm <= radius),
    )
    if not converged:
        result.warnings.append(f"no convergence within {cfg.max_iter} iterations")
        if strict:
            raise NoConvergence(result)
    return result

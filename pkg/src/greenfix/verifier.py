"""Independent checks on solved states and empirical operator estimates.

Random inputs are always drawn up front from a seeded generator and the
per-member work is mapped over a thread pool, so every report is
bit-identical regardless of the number of workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .hypothesis import GUARANTEED, FAILS
from .kernel import ABOVE, BELOW
from .seqspace import LpParams, TruncatedState, family_tails, sup_norm
from .solver import GAUSS, SolverConfig, apply_operator, discretize, forcing_at_nodes
from .systems import sample_ball

DEFAULT_THRESHOLDS = {
    "residual_fd": 1e-3,
    "residual_analytic": 1e-6,
    "boundary": 1e-12,
    "slack": 1e-6,
}


def _pmap(fn, items, threads):
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def random_ball_states(rng, mesh, J, radius, params=None, count=1, decay=0.7):
    """Smooth random trajectories with ``sup_t ||v(t)||_p <= radius``.

    Each component is ``a_j sin(w_j t + phase_j)`` where the amplitude
    vector ``a`` has geometrically decaying magnitudes (see
    :func:`greenfix.systems.sample_ball`), so families carry real tails.
    """
    params = params or LpParams()
    T = mesh[-1]
    amps = sample_ball(rng, J, radius, params, decay=decay, size=count)
    freq = rng.uniform(0.0, 3.0 * np.pi / T, size=(count, J, 1))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(count, J, 1))
    profiles = np.sin(freq * mesh[None, None, :] + phase)
    return [TruncatedState(mesh, amps[i][:, None] * profiles[i]) for i in range(count)]


# ----------------------------------------------------------------------
# residuals

@dataclass
class ResidualReport:
    max_residual: float
    location: Optional[tuple]  # (j, m, t) of the worst residual, 1-based j
    boundary_max: float

    def to_json(self):
        return asdict(self)


def _worst(res, mesh, offset=0):
    if res.size == 0:
        return 0.0, None
    idx = np.unravel_index(np.argmax(np.abs(res)), res.shape)
    j, m = int(idx[0]), int(idx[1]) + offset
    return float(np.abs(res[idx])), (j + 1, m, float(mesh[m]))


def _boundary(state):
    return float(max(np.max(np.abs(state.values[:, 0])), np.max(np.abs(state.values[:, -1]))))


def residual_fd(state, spec):
    """Max of ``|D^2 v_j + v_j - f_j(t, v)|`` over interior mesh points.

    ``D^2`` is the central second difference on the uniform mesh.
    """
    if hasattr(state, "state"):
        state = state.state
    v = state.values
    mesh = state.mesh
    h = mesh[1] - mesh[0]
    d2 = (v[:, 2:] - 2.0 * v[:, 1:-1] + v[:, :-2]) / h**2
    f = spec.evaluate(mesh[1:-1], v[:, 1:-1])
    res = d2 + v[:, 1:-1] - f
    worst, loc = _worst(res, mesh, offset=1)
    return ResidualReport(worst, loc, _boundary(state))


def cross_config(cfg):
    """A quadrature independent of ``cfg`` for cross-checking its fixed points."""
    order = cfg.gauss_order + 2 if cfg.quadrature == GAUSS else 6
    return SolverConfig(J=cfg.J, M=cfg.M, quadrature=GAUSS, gauss_order=order,
                        tol=cfg.tol, max_iter=cfg.max_iter, relaxation=cfg.relaxation)


def residual_analytic(state, spec, kernel, cfg):
    """Residual of ``v'' + v - f`` with ``v''`` from the differentiated integral formula.

    ``v''`` is the second derivative of ``F(v)``: the branchwise
    ``d^2G/dt^2`` integrated against ``f`` plus the diagonal jump term of
    ``dG/dt``.  The integrals use a Gauss-Legendre rule different from the
    solver's, so the residual measures quadrature error and fixed-point
    defect without any finite differencing.
    """
    if hasattr(state, "state"):
        state = state.state
    xcfg = cross_config(cfg)
    disc = discretize(kernel, xcfg.M, xcfg.quadrature, xcfg.gauss_order, derivative=2)
    f_nodes = forcing_at_nodes(spec, disc, state.values)
    t = state.mesh
    jump = kernel.dt_onesided(t, t, ABOVE) - kernel.dt_onesided(t, t, BELOW)
    f_mesh = spec.evaluate(t, state.values)
    second = -(f_nodes @ disc.weights.T + jump[None, :] * f_mesh)
    res = second + state.values - f_mesh
    worst, loc = _worst(res, t)
    return ResidualReport(worst, loc, _boundary(state))


# ----------------------------------------------------------------------
# operator estimates

@dataclass
class BoundReport:
    n_states: int
    worst_norm_margin: float  # min of bound - sup_norm(F v)
    worst_ball_margin: Optional[float]  # min of r - sup_norm(F v), None without a radius
    passed: bool

    def to_json(self):
        return asdict(self)


def operator_bound_check(spec, kernel, cfg, params, G, H, radius, n_states=100, seed=0,
                         slack=1e-6, threads=None):
    """Check ``sup ||F v|| <= (T/2) tan(T/2) (G + H sup ||v||^p)^(1/p)`` and ball invariance.

    States are drawn inside the ball of ``radius``.
    """
    params = params or LpParams()
    p = params.p
    T = kernel.T
    rng = np.random.default_rng(seed)
    states = random_ball_states(rng, cfg.mesh(T), cfg.J, radius, params, n_states)
    scale = 0.5 * T * np.tan(0.5 * T)

    def one(state):
        image = sup_norm(apply_operator(spec, kernel, state, cfg), params)
        bound = scale * (G + H * sup_norm(state, params) ** p) ** (1.0 / p)
        return bound - image, radius - image

    margins = np.array(_pmap(one, states, threads))
    norm_margin = float(np.min(margins[:, 0]))
    ball_margin = float(np.min(margins[:, 1]))
    return BoundReport(n_states, norm_margin, ball_margin,
                       passed=bool(norm_margin >= -slack and ball_margin >= -slack))


@dataclass
class ContractionReport:
    cutoffs: list
    margins: list  # one list per family, one margin per cutoff
    worst_margin: float
    passed: bool
    slack: float = 1e-6

    def to_json(self):
        return asdict(self)


def contraction_margins(spec, kernel, cfg, params, family, H, cutoffs):
    """Margins ``rhs - lhs`` of the pre-supremum tail inequality for one family.

    ``lhs = tail_n(F E)^p`` and
    ``rhs = ((T/2) tan(T/2))^p (Gbar_n + H tail_n(E)^p)`` where ``Gbar_n``
    bounds ``sup_t sum_{k>=n} g_k(t)``.
    """
    params = params or LpParams()
    p = params.p
    T = kernel.T
    scale = (0.5 * T * np.tan(0.5 * T)) ** p
    images = [apply_operator(spec, kernel, s, cfg) for s in family]
    tails_in = family_tails(family, params)
    tails_out = family_tails(images, params)
    out = []
    for n in cutoffs:
        lhs = tails_out.at(n) ** p
        rhs = scale * (spec.g_tail_bound(n, T) + H * tails_in.at(n) ** p)
        out.append(float(rhs - lhs))
    return out


def mnc_contraction_check(spec, kernel, cfg, params, H, radius, family_size=10,
                          cutoffs=None, n_families=1, seed=0, slack=1e-6, threads=None):
    params = params or LpParams()
    cutoffs = list(cutoffs) if cutoffs is not None else list(range(1, cfg.J + 1))
    rng = np.random.default_rng(seed)
    mesh = cfg.mesh(kernel.T)
    families = [random_ball_states(rng, mesh, cfg.J, radius, params, family_size)
                for _ in range(n_families)]
    margins = _pmap(lambda fam: contraction_margins(spec, kernel, cfg, params, fam, H, cutoffs),
                    families, threads)
    worst = float(min(min(m) for m in margins))
    return ContractionReport(cutoffs, margins, worst, passed=bool(worst >= -slack), slack=slack)


@dataclass
class EquicontinuityReport:
    eps: list
    modulus: list  # max over pairs of sup_t ||F u - F v||_p
    ratios: list  # modulus / eps
    monotone: bool

    def to_json(self):
        return asdict(self)


def equicontinuity_probe(spec, kernel, cfg, params, eps_list=(1e-1, 1e-2, 1e-3), n_pairs=10,
                         radius=0.5, seed=0, threads=None):
    """Sample the modulus of continuity of ``F`` at several perturbation sizes.

    The same base states and perturbation directions are reused for every
    ``eps``, so for affine systems the ratio modulus / eps is constant.
    """
    params = params or LpParams()
    rng = np.random.default_rng(seed)
    mesh = cfg.mesh(kernel.T)
    bases = random_ball_states(rng, mesh, cfg.J, radius, params, n_pairs)
    dirs = random_ball_states(rng, mesh, cfg.J, 1.0, params, n_pairs)
    dirs = [d.values / max(sup_norm(d, params), 1e-300) for d in dirs]
    eps_list = sorted((float(e) for e in eps_list), reverse=True)

    def one(args):
        base, direction, eps = args
        u = apply_operator(spec, kernel, base, cfg).values
        moved = TruncatedState(mesh, base.values + eps * direction)
        v = apply_operator(spec, kernel, moved, cfg).values
        return sup_norm(u - v, params)

    modulus = []
    for eps in eps_list:
        diffs = _pmap(one, [(b, d, eps) for b, d in zip(bases, dirs)], threads)
        modulus.append(float(max(diffs)))
    monotone = all(b <= a for a, b in zip(modulus, modulus[1:]))
    ratios = [m / e if e > 0 else 0.0 for m, e in zip(modulus, eps_list)]
    return EquicontinuityReport(eps_list, modulus, ratios, monotone)


# ----------------------------------------------------------------------
# full verification

@dataclass
class VerificationReport:
    residual_fd: ResidualReport
    residual_analytic: ResidualReport
    boundary_max: float
    ball_invariance: Optional[dict]
    contraction: Optional[ContractionReport]
    equicontinuity: EquicontinuityReport
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {
            "residual_fd": self.residual_fd.to_json(),
            "residual_analytic": self.residual_analytic.to_json(),
            "boundary_max": self.boundary_max,
            "ball_invariance": self.ball_invariance,
            "contraction_margins": [] if self.contraction is None else self.contraction.margins,
            "contraction_cutoffs": [] if self.contraction is None else self.contraction.cutoffs,
            "equicontinuity": [
                {"eps": e, "modulus": m, "ratio": r}
                for e, m, r in zip(self.equicontinuity.eps, self.equicontinuity.modulus,
                                   self.equicontinuity.ratios)
            ],
            "passed": self.passed,
            "failures": list(self.failures),
        }


def verify(spec, kernel, cfg, params, state, report, thresholds=None, seed=0, threads=None,
           n_families=5, family_size=8, n_states=20):
    """Run every check on ``state`` and collect the failures against ``thresholds``."""
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    slack = th["slack"]
    failures = []

    fd = residual_fd(state, spec)
    if fd.max_residual > th["residual_fd"]:
        failures.append(f"residual_fd {fd.max_residual:.3e} > {th['residual_fd']:g} at (j, m, t) = {fd.location}")
    an = residual_analytic(state, spec, kernel, cfg)
    if an.max_residual > th["residual_analytic"]:
        failures.append(
            f"residual_analytic {an.max_residual:.3e} > {th['residual_analytic']:g} at (j, m, t) = {an.location}"
        )
    boundary = fd.boundary_max
    if boundary > th["boundary"]:
        failures.append(f"boundary values {boundary:.3e} > {th['boundary']:g}")

    ball = None
    contraction = None
    if report.verdict == GUARANTEED:
        r = report.r
        state_norm = sup_norm(state, params)
        bounds = operator_bound_check(spec, kernel, cfg, params, report.G_majorant, report.H, r,
                                      n_states=n_states, seed=seed, slack=slack, threads=threads)
        ball = {
            "radius": r,
            "state_sup_norm": state_norm,
            "state_in_ball": bool(state_norm <= r + slack),
            **bounds.to_json(),
        }
        if not ball["state_in_ball"]:
            failures.append(f"state sup norm {state_norm:.6g} exceeds radius {r:.6g}")
        if not bounds.passed:
            failures.append("operator norm bound / ball invariance violated")
    if report.verdict != FAILS:
        r = report.r if report.r is not None else max(sup_norm(state, params), 1e-3)
        contraction = mnc_contraction_check(
            spec, kernel, cfg, params, report.H, r, family_size=family_size,
            n_families=n_families, seed=seed, slack=slack, threads=threads,
        )
        if not contraction.passed:
            failures.append(f"tail contraction margin {contraction.worst_margin:.3e} < -{slack:g}")
    equi = equicontinuity_probe(spec, kernel, cfg, params, seed=seed, threads=threads,
                                radius=max(sup_norm(state, params), 1e-3))
    if not equi.monotone:
        failures.append("equicontinuity modulus does not decrease with eps")
    return VerificationReport(fd, an, boundary, ball, contraction, equi, failures)

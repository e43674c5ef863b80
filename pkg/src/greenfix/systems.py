"""Right-hand sides ``f = (f_j)`` together with their growth envelopes.

Every system is described by a :class:`SystemSpec`.  The growth condition

    |f_j(t, v)|^p <= g_j(t) + h_j(t) |v_j|^p

is what the existence constants are built from, so a system always carries
``g`` and ``h`` next to ``f`` and the registry refuses configs whose
envelopes fail a load-time spot check.

Component indices ``j`` are 1-based throughout.  All vectorised callables
take a time array ``t`` of shape ``(N,)`` and states of shape ``(J, N)``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import lgamma
from typing import Callable, Optional

import numpy as np
from scipy.special import polygamma

from .errors import ComponentOutOfRange, EnvelopeViolation, MalformedConfig, UnknownSystem
from .seqspace import LpParams

E = np.e
PI2_E_12 = np.pi**2 * np.e / 12.0


@dataclass(frozen=True)
class SystemSpec:
    label: str
    evaluate: Callable  # (t[N], V[J, N]) -> f[J, N]
    g: Callable  # (j[J], t[N]) -> g[J, N]
    h: Callable  # (j[J], t[N]) -> h[J, N]
    g_tail_bound: Callable  # (n, T) -> bound on sup_t sum_{k>=n} g_k(t)
    component_tail_bound: Callable  # (J, t[N], radius) -> [J, N] bound on dropped k > J terms
    G_majorant: Optional[Callable] = None  # T -> closed-form bound on sup_t sum_k g_k(t)
    H_sup: Optional[Callable] = None  # T -> sup_{j, t} h_j(t)
    affine: bool = False
    meta: dict = field(default_factory=dict)

    def f_matrix(self, t, V):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        V = np.asarray(V, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        return self.evaluate(t, V)

    def g_matrix(self, J, t):
        return self.g(np.arange(1, J + 1), np.atleast_1d(np.asarray(t, dtype=float)))

    def h_matrix(self, J, t):
        return self.h(np.arange(1, J + 1), np.atleast_1d(np.asarray(t, dtype=float)))


def eval_f(spec, j, t, v):
    """Value of component ``f_j(t, v)`` for a truncated vector ``v``."""
    v = np.asarray(v, dtype=float)
    if not 1 <= j <= v.size:
        raise ComponentOutOfRange(f"component {j} outside 1..{v.size}")
    return float(spec.f_matrix([t], v[:, None])[j - 1, 0])


# ----------------------------------------------------------------------
# built-in: the l2 worked example

def _inv_sqrt_factorial(k):
    """``1 / sqrt((k-1)!)`` for an integer array ``k >= 1``."""
    return np.exp(-0.5 * np.array([lgamma(float(x)) for x in np.atleast_1d(k)]))


@lru_cache(maxsize=32)
def _example_coeffs(J):
    n = np.arange(1, J + 1)[:, None]
    k = np.arange(1, J + 1)[None, :]
    gap = np.maximum(k - n, 0)
    lin = np.where(k >= n, _inv_sqrt_factorial(np.arange(1, J + 1))[None, :] / ((1 + 2 * n) * (gap + 1)), 0.0)
    quad = lin * gap
    lin.setflags(write=False)
    quad.setflags(write=False)
    return lin, quad


def _example_f(t, V):
    J = V.shape[0]
    lin, quad = _example_coeffs(J)
    n = np.arange(1, J + 1)[:, None]
    forcing = t[None, :] * 3.0 ** (-n * t[None, :]) / n
    series = lin @ V - quad @ (V * V)
    return forcing + np.cos(t)[None, :] * series


def _example_g(j, t):
    j = np.asarray(j, dtype=float)[:, None]
    t = t[None, :]
    return 2.0 * t**2 * 3.0 ** (-2.0 * j * t) / j**2 + PI2_E_12 * np.cos(t) ** 2 / (1 + 2 * j) ** 2


def _example_h(j, t):
    j = np.asarray(j, dtype=float)[:, None]
    return 2.0 * E * np.cos(t[None, :]) ** 2 / (1 + 2 * j) ** 2


# max_t t^2 9^(-k t) = 4 / (e k ln 9)^2
_PEAK = 8.0 / (E * np.log(9.0)) ** 2
_TAIL_TERMS = 4096


def _example_g_tail(n, T):
    """Bound on ``sup_{t in [0,T]} sum_{k>=n} g_k(t)`` via termwise suprema."""
    n = int(n)
    if n < 1:
        raise ValueError("cutoff must be >= 1")
    k = np.arange(n, n + _TAIL_TERMS, dtype=float)
    forcing = np.sum(np.minimum(2.0 * T**2, _PEAK / k**2) / k**2)
    # remaining forcing terms are <= _PEAK / k^4, summed by the tetragamma series
    forcing += _PEAK * float(polygamma(3, n + _TAIL_TERMS)) / 6.0
    coupling = PI2_E_12 * 0.25 * float(polygamma(1, n + 0.5))
    return forcing + coupling


def _factorial_tail(J):
    """``sum_{k>J} 1/sqrt((k-1)!)``; terms past 200 are below double precision."""
    return float(np.sum(_inv_sqrt_factorial(np.arange(J + 1, J + 201))[::-1]))


def _example_component_tail(J, t, radius):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = np.arange(1, J + 1)[:, None]
    R = float(radius)
    return np.abs(np.cos(t))[None, :] / (1 + 2 * n) * (R + R * R) * _factorial_tail(J)


def paper_example():
    return SystemSpec(
        label="paper_example",
        evaluate=_example_f,
        g=_example_g,
        h=_example_h,
        g_tail_bound=_example_g_tail,
        component_tail_bound=_example_component_tail,
        G_majorant=lambda T: (2.0 * T**2 + PI2_E_12) * np.pi**2 / 6.0,
        H_sup=lambda T: 2.0 * E / 9.0,
        meta={"p": 2.0},
    )


# ----------------------------------------------------------------------
# built-in: trivial systems

def _zeros_like(t, V):
    return np.zeros((V.shape[0], t.size))


def _zero_env(j, t):
    return np.zeros((np.size(j), np.size(t)))


def zero_system():
    return SystemSpec(
        label="zero",
        evaluate=_zeros_like,
        g=_zero_env,
        h=_zero_env,
        g_tail_bound=lambda n, T: 0.0,
        component_tail_bound=lambda J, t, radius: np.zeros((J, np.size(t))),
        G_majorant=lambda T: 0.0,
        H_sup=lambda T: 0.0,
        affine=True,
    )


def _unit_first(t, V):
    out = np.zeros((V.shape[0], t.size))
    out[0] = 1.0
    return out


def _unit_first_env(j, t):
    out = np.zeros((np.size(j), np.size(t)))
    out[np.asarray(j) == 1] = 1.0
    return out


def constant_forcing():
    """``f_1 = 1`` and every other component zero."""
    return SystemSpec(
        label="constant_forcing",
        evaluate=_unit_first,
        g=_unit_first_env,
        h=_zero_env,
        g_tail_bound=lambda n, T: 1.0 if n <= 1 else 0.0,
        component_tail_bound=lambda J, t, radius: np.zeros((J, np.size(t))),
        G_majorant=lambda T: 1.0,
        H_sup=lambda T: 0.0,
        affine=True,
    )


BUILTINS = {
    "paper_example": paper_example,
    "zero": zero_system,
    "constant_forcing": constant_forcing,
}


# ----------------------------------------------------------------------
# coefficient-table systems

def _poly(coeffs, where):
    if not isinstance(coeffs, (list, tuple)) or not coeffs:
        raise MalformedConfig(f"{where}: expected a non-empty list of polynomial coefficients")
    try:
        return np.array([float(c) for c in coeffs])
    except (TypeError, ValueError) as exc:
        raise MalformedConfig(f"{where}: {exc}") from None


def _index(key, where):
    try:
        i = int(key)
    except (TypeError, ValueError):
        raise MalformedConfig(f"{where}: component index {key!r} is not an integer") from None
    if i < 1:
        raise MalformedConfig(f"{where}: component index {i} must be >= 1")
    return i


def _rows(table, where):
    if table is None:
        return {}
    if not isinstance(table, dict):
        raise MalformedConfig(f"{where}: expected an object keyed by component index")
    return {_index(j, where): row for j, row in table.items()}


def _polyval(c, t):
    # coefficients in increasing powers of t
    return np.polynomial.polynomial.polyval(t, c)


def _poly_sup(c, T):
    return float(np.sum(np.abs(c) * T ** np.arange(c.size)))


@dataclass(frozen=True)
class CoefficientTable:
    """``f_j = a_j(t) + sum_k b_jk(t) v_k + c_jk(t) v_k^2`` with polynomial coefficients."""

    a: dict
    b: dict  # (j, k) -> poly
    c: dict  # (j, k) -> poly
    g: dict
    h: dict

    @classmethod
    def from_config(cls, raw):
        if not isinstance(raw, dict) or "coeffs" not in raw or "envelopes" not in raw:
            raise MalformedConfig('custom system needs "coeffs" and "envelopes"')
        coeffs, env = raw["coeffs"], raw["envelopes"]
        if not isinstance(coeffs, dict) or not isinstance(env, dict):
            raise MalformedConfig('"coeffs" and "envelopes" must be objects')
        unknown = set(coeffs) - {"a", "b", "c"}
        if unknown:
            raise MalformedConfig(f"unknown coefficient tables {sorted(unknown)}")
        a = {j: _poly(row, f"a[{j}]") for j, row in _rows(coeffs.get("a"), "a").items()}
        pairs = {}
        for name in ("b", "c"):
            table = {}
            for j, row in _rows(coeffs.get(name), name).items():
                for k, poly in _rows(row, f"{name}[{j}]").items():
                    table[j, k] = _poly(poly, f"{name}[{j}][{k}]")
            pairs[name] = table
        g = {j: _poly(row, f"g[{j}]") for j, row in _rows(env.get("g"), "g").items()}
        h = {j: _poly(row, f"h[{j}]") for j, row in _rows(env.get("h"), "h").items()}
        return cls(a, pairs["b"], pairs["c"], g, h)

    def evaluate(self, t, V):
        J = V.shape[0]
        out = np.zeros((J, t.size))
        for j, poly in self.a.items():
            if j <= J:
                out[j - 1] += _polyval(poly, t)
        for (j, k), poly in self.b.items():
            if j <= J and k <= J:
                out[j - 1] += _polyval(poly, t) * V[k - 1]
        for (j, k), poly in self.c.items():
            if j <= J and k <= J:
                out[j - 1] += _polyval(poly, t) * V[k - 1] ** 2
        return out

    def _env(self, table, j, t):
        out = np.zeros((np.size(j), np.size(t)))
        for row, jj in enumerate(np.atleast_1d(j)):
            if int(jj) in table:
                out[row] = _polyval(table[int(jj)], t)
        return out

    def g_values(self, j, t):
        return self._env(self.g, j, t)

    def h_values(self, j, t):
        return self._env(self.h, j, t)

    def g_tail(self, n, T):
        return float(sum(_poly_sup(c, T) for j, c in self.g.items() if j >= n))

    def h_sup(self, T):
        return max((_poly_sup(c, T) for c in self.h.values()), default=0.0)

    def component_tail(self, J, t, radius):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((J, t.size))
        R = float(radius)
        for (j, k), poly in self.b.items():
            if j <= J < k:
                out[j - 1] += np.abs(_polyval(poly, t)) * R
        for (j, k), poly in self.c.items():
            if j <= J < k:
                out[j - 1] += np.abs(_polyval(poly, t)) * R * R
        return out

    def to_spec(self, label="custom"):
        return SystemSpec(
            label=label,
            evaluate=self.evaluate,
            g=self.g_values,
            h=self.h_values,
            g_tail_bound=self.g_tail,
            component_tail_bound=self.component_tail,
            H_sup=self.h_sup,
            affine=not self.c,
        )


# ----------------------------------------------------------------------
# envelope audit and registry

@dataclass
class EnvelopeReport:
    worst_margin: float
    n_checked: int
    violations: list

    @property
    def ok(self):
        return not self.violations


def envelope_check(spec, samples, params=None, max_listed=20):
    """Check the growth envelope on ``(t, v)`` samples.

    The margin of a component is ``g_j + h_j |v_j|^p - |f_j|^p``; negative
    margins are listed as ``(sample, j, t, margin)`` violations.
    """
    params = params or LpParams()
    p = params.p
    worst = np.inf
    checked = 0
    violations = []
    for idx, (t, v) in enumerate(samples):
        v = np.asarray(v, dtype=float)
        J = v.size
        f = spec.f_matrix([t], v[:, None])[:, 0]
        rhs = spec.g_matrix(J, [t])[:, 0] + spec.h_matrix(J, [t])[:, 0] * np.abs(v) ** p
        margin = rhs - np.abs(f) ** p
        checked += J
        worst = min(worst, float(np.min(margin)))
        for j in np.flatnonzero(margin < 0.0):
            if len(violations) < max_listed:
                violations.append((idx, int(j) + 1, float(t), float(margin[j])))
            else:
                break
    return EnvelopeReport(worst if checked else 0.0, checked, violations)


def sample_ball(rng, J, radius, params=None, decay=0.7, size=None):
    """Random truncated vectors with geometric decay, scaled into the ball of ``radius``.

    Component magnitudes follow ``decay**j`` with random signs and jitter;
    each vector is rescaled to a uniform-random fraction of ``radius``.
    """
    params = params or LpParams()
    count = 1 if size is None else size
    j = np.arange(1, J + 1)
    shape = decay**j * rng.uniform(0.5, 1.0, size=(count, J)) * rng.choice([-1.0, 1.0], size=(count, J))
    norms = np.sum(np.abs(shape) ** params.p, axis=1) ** (1.0 / params.p)
    frac = rng.uniform(0.0, 1.0, size=count)
    out = shape / norms[:, None] * (radius * frac)[:, None]
    return out[0] if size is None else out


def spot_samples(T, J, radius, params=None, n_t=11, n_v=8, seed=0):
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.0, T, n_t)
    vs = [np.zeros(J)] + list(sample_ball(rng, J, radius, params, size=n_v))
    return [(t, v) for t in ts for v in vs]


DEFAULT_ENVELOPE_RADIUS = 0.5


def load_system(config):
    """Build the :class:`SystemSpec` named or described by a parsed config."""
    if not isinstance(config, dict) or "system" not in config:
        raise MalformedConfig('config must be an object with a "system" entry')
    raw = config["system"]
    if isinstance(raw, str):
        if raw not in BUILTINS:
            raise UnknownSystem(f"unknown system {raw!r}; built-ins are {sorted(BUILTINS)}")
        spec = BUILTINS[raw]()
    elif isinstance(raw, dict):
        spec = CoefficientTable.from_config(raw).to_spec(str(raw.get("label", "custom")))
    else:
        raise MalformedConfig('"system" must be a built-in name or a coefficient table')

    try:
        T = float(config.get("T", 1.0))
        J = int(config.get("J", 10))
        params = LpParams(float(config.get("p", 2.0)))
        radius = float(config.get("envelope_radius", DEFAULT_ENVELOPE_RADIUS))
    except (TypeError, ValueError) as exc:
        raise MalformedConfig(str(exc)) from None

    ts = np.linspace(0.0, T, 11)
    if np.any(spec.g_matrix(J, ts) < 0.0) or np.any(spec.h_matrix(J, ts) < 0.0):
        raise EnvelopeViolation(f"{spec.label}: envelopes g, h must be nonnegative")
    report = envelope_check(spec, spot_samples(T, J, radius, params), params)
    if not report.ok:
        raise EnvelopeViolation(f"{spec.label}: growth envelope fails at {report.violations[:3]}")
    return spec

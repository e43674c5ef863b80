"""Truncated lp vectors, trajectories in C(I, lp) and tail-based MNC estimates.

Truncated vectors are plain 1-D numpy arrays of length ``J``; component
``k`` (1-based, as in the mathematics) lives at index ``k - 1``.

For a bounded set ``E`` in lp the Hausdorff measure of noncompactness is
the limit over ``n`` of the supremum tail norm ``sup_E (sum_{k>=n} |e_k|^p)^(1/p)``.
On truncated data that limit is always zero, so this module exposes the
whole tail profile and a cutoff-indexed proxy instead.  ``family_mnc``
takes the supremum over mesh points as well, which is only meaningful for
equicontinuous families (not checked here).
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadCutoff, EmptyFamily, MeshMismatch


@dataclass(frozen=True)
class LpParams:
    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def q(self):
        """Hölder conjugate exponent; ``inf`` when ``p == 1``."""
        return np.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    def holder_factor(self, T):
        """``T^(p/q) = T^(p-1)``, equal to 1 for ``p == 1``."""
        return T ** (self.p - 1.0)


@dataclass
class TruncatedState:
    """Values ``v_j(t_m)`` on a mesh: ``values[j-1, m]``."""

    mesh: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.mesh = np.asarray(self.mesh, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.mesh.size:
            raise MeshMismatch(
                f"values shape {self.values.shape} does not match mesh of size {self.mesh.size}"
            )
        if self.mesh.size < 2 or np.any(np.diff(self.mesh) <= 0.0):
            raise ValueError("mesh must be strictly increasing with at least two points")
        if self.mesh[0] != 0.0:
            raise ValueError("mesh must start at 0")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("state values must be finite")

    @property
    def J(self):
        return self.values.shape[0]

    @property
    def M(self):
        return self.mesh.size

    @property
    def T(self):
        return float(self.mesh[-1])

    @classmethod
    def zeros(cls, mesh, J):
        mesh = np.asarray(mesh, dtype=float)
        return cls(mesh, np.zeros((J, mesh.size)))

    def column(self, m):
        return self.values[:, m]

    def copy(self):
        return TruncatedState(self.mesh.copy(), self.values.copy())


@dataclass(frozen=True)
class TailProfile:
    """``tails[n-1]`` is the sup-over-family tail norm from component ``n``; n = 1..J+1."""

    tails: np.ndarray

    @property
    def J(self):
        return self.tails.size - 1

    def at(self, n):
        if not 1 <= n <= self.tails.size:
            raise BadCutoff(f"cutoff {n} outside 1..{self.tails.size}")
        return float(self.tails[n - 1])


def _as_params(params):
    if params is None:
        return LpParams()
    if isinstance(params, LpParams):
        return params
    return LpParams(float(params))


def p_norm(v, params=None):
    p = _as_params(params).p
    v = np.abs(np.asarray(v, dtype=float))
    if p == 2.0:
        return float(np.sqrt(np.sum(v * v)))
    return float(np.sum(v**p) ** (1.0 / p))


def column_norms(values, params=None):
    """lp norm of every column of a ``J x M`` array."""
    p = _as_params(params).p
    a = np.abs(np.asarray(values, dtype=float))
    if p == 2.0:
        return np.sqrt(np.sum(a * a, axis=0))
    return np.sum(a**p, axis=0) ** (1.0 / p)


def sup_norm(state, params=None):
    """``max_m ||v(t_m)||_p`` on the mesh."""
    values = state.values if isinstance(state, TruncatedState) else state
    return float(np.max(column_norms(values, params)))


def _tail_powers(a, p):
    """Reverse cumulative sums of ``|a|^p`` along the last axis, with a trailing zero."""
    powered = np.abs(a) ** p
    rev = np.cumsum(powered[..., ::-1], axis=-1)[..., ::-1]
    pad = np.zeros(rev.shape[:-1] + (1,))
    return np.concatenate([rev, pad], axis=-1)


def tail_profile(family, params=None):
    """Supremum tail norms of a finite family of truncated vectors."""
    params = _as_params(params)
    family = [np.asarray(e, dtype=float) for e in family]
    if not family:
        raise EmptyFamily("tail_profile needs at least one vector")
    sizes = {e.size for e in family}
    if len(sizes) != 1:
        raise ValueError(f"family members have differing lengths {sorted(sizes)}")
    stacked = np.stack(family)
    sums = _tail_powers(stacked, params.p)
    return TailProfile(np.max(sums, axis=0) ** (1.0 / params.p))


def mnc_estimate(family, params=None, cutoff=1, analytic_tail=0.0):
    """Upper proxy for the MNC of a family at a given truncation cutoff.

    Returns ``tails[cutoff] + analytic_tail``.  ``analytic_tail`` is an
    externally supplied bound on the components discarded by truncation.
    """
    profile = tail_profile(family, params)
    if not 1 <= cutoff <= profile.J + 1:
        raise BadCutoff(f"cutoff {cutoff} outside 1..{profile.J + 1}")
    return profile.at(cutoff) + float(analytic_tail)


def family_tails(states, params=None):
    """Per-cutoff sup over family members and mesh points of the tail norms."""
    params = _as_params(params)
    states = list(states)
    if not states:
        raise EmptyFamily("family_mnc needs at least one state")
    ref = states[0]
    for s in states[1:]:
        if s.values.shape != ref.values.shape or not np.array_equal(s.mesh, ref.mesh):
            raise MeshMismatch("family members must share mesh and truncation")
    # (S, J, M) -> (S, M, J) so tails run along the last axis
    stacked = np.stack([s.values for s in states]).transpose(0, 2, 1)
    sums = _tail_powers(stacked, params.p)
    return TailProfile(np.max(sums, axis=(0, 1)) ** (1.0 / params.p))


def family_mnc(states, params=None, cutoff=1):
    profile = family_tails(states, params)
    if not 1 <= cutoff <= profile.J + 1:
        raise BadCutoff(f"cutoff {cutoff} outside 1..{profile.J + 1}")
    return profile.at(cutoff)

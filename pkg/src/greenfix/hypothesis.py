"""Existence constants and the conditions under which the operator is condensing.

Two conditions are reported.  ``cond_A = (H T)^(1/p) tan(T/2)`` is the
classical stated condition.  ``cond_B = H^(1/p) T tan(T/2)`` comes from
carrying the Hölder factor ``T^(p/q)`` through the tail estimate; it is
also exactly the condition for the ball radius ``r`` to exist.  Both must
be below 2 for the verdict ``guaranteed``.
"""

from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .seqspace import LpParams

GUARANTEED = "guaranteed"
STATED_ONLY = "stated-condition-only"
FAILS = "fails"


class Constants(NamedTuple):
    G_majorant: float
    G_numeric: float
    H: float


@dataclass
class HypothesisReport:
    T: float
    p: float
    G_majorant: float
    G_numeric: float
    H: float
    cond_A: float
    cond_B: float
    k_contraction: float
    r: Optional[float]
    verdict: str
    notes: list

    def to_json(self):
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, (np.floating, np.integer)):
                out[key] = val.item()
        return out


def compute_constants(spec, T, params=None, J=50, t_samples=201):
    """Growth constants ``G`` and ``H`` of a system on ``[0, T]``.

    ``G_numeric`` is the sampled sup of the partial sums of ``g_j`` plus the
    system's analytic tail bound past ``J``.  ``H`` is the larger of the
    sampled sup of ``h_j`` and the system's analytic sup (when it has one).
    """
    params = params or LpParams()
    if J < 1 or t_samples < 1:
        raise ValueError("J and t_samples must be >= 1")
    ts = np.linspace(0.0, T, t_samples)
    H = float(np.max(spec.h_matrix(J, ts)))
    if spec.H_sup is not None:
        H = max(H, float(spec.H_sup(T)))
    partial = np.sum(spec.g_matrix(J, ts), axis=0)
    G_numeric = float(np.max(partial)) + float(spec.g_tail_bound(J + 1, T))
    if spec.G_majorant is not None:
        G_majorant = float(spec.G_majorant(T))
    else:
        G_majorant = G_numeric
    return Constants(G_majorant, G_numeric, H)


def radius(G, H, T, params=None):
    """Smallest ``R`` with ``(T/2) tan(T/2) (G + H R^p)^(1/p) <= R``, or None."""
    p = (params or LpParams()).p
    x = T * np.tan(0.5 * T)
    den = 2.0**p - H * x**p
    if not den > 0.0:
        return None
    return float(G ** (1.0 / p) * x / den ** (1.0 / p))


def check_conditions(G, H, T, params=None, G_numeric=None):
    params = params or LpParams()
    p = params.p
    if G < 0.0 or H < 0.0:
        raise ValueError("G and H must be nonnegative")
    tan_half = np.tan(0.5 * T)
    cond_A = float((H * T) ** (1.0 / p) * tan_half)
    cond_B = float(H ** (1.0 / p) * T * tan_half)
    notes = []
    if T >= np.pi:
        # kernel bound tan(T/2)/2 no longer dominates |G|
        notes.append("T >= pi: kernel bound not valid, no guarantee")
        r = None
        verdict = FAILS
    else:
        r = radius(G, H, T, params) if cond_B < 2.0 else None
        if cond_A < 2.0 and cond_B < 2.0:
            verdict = GUARANTEED
        elif cond_A < 2.0:
            verdict = STATED_ONLY
            notes.append("stated condition holds but the self-map radius does not exist")
        else:
            verdict = FAILS
    return HypothesisReport(
        T=float(T),
        p=float(p),
        G_majorant=float(G),
        G_numeric=float(G if G_numeric is None else G_numeric),
        H=float(H),
        cond_A=cond_A,
        cond_B=cond_B,
        k_contraction=0.5 * max(cond_A, cond_B),
        r=r,
        verdict=verdict,
        notes=notes,
    )


def assess(spec, T, params=None, J=50, t_samples=201):
    """Constants plus conditions in one report."""
    consts = compute_constants(spec, T, params, J, t_samples)
    return check_conditions(consts.G_majorant, consts.H, T, params, G_numeric=consts.G_numeric)

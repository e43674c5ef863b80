"""Green's function of ``v'' + v`` with homogeneous Dirichlet data on ``[0, T]``.

The kernel is evaluated in the symmetric min/max form

    G(t, s) = sin(min(t, s)) * sin(T - max(t, s)) / sin(T)

which vanishes on the boundary of the square and satisfies
``0 <= G <= tan(T/2)/2`` for ``0 < T < pi``.  With this kernel,
``u = int G f ds`` solves ``u'' + u = -f``; the solver carries the sign.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInterval, OutOfDomain

DEFAULT_EPS_T = 1e-8

BELOW = "below"
ABOVE = "above"


@dataclass(frozen=True)
class GreenKernel:
    T: float
    eps_T: float = DEFAULT_EPS_T

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0.0:
            raise InvalidInterval(self.T, self.eps_T)
        if abs(np.sin(self.T)) <= self.eps_T:
            raise InvalidInterval(self.T, self.eps_T)

    @property
    def sin_T(self):
        return np.sin(self.T)

    @property
    def nonnegative(self):
        """True when the kernel is guaranteed nonnegative (``T < pi``)."""
        return self.T < np.pi

    def _check(self, *xs):
        for x in xs:
            x = np.asarray(x, dtype=float)
            if np.any(x < 0.0) or np.any(x > self.T) or np.any(~np.isfinite(x)):
                raise OutOfDomain(f"argument outside [0, {self.T}]")

    def eval(self, t, s):
        """Kernel value ``G(t, s)``; broadcasts over array arguments."""
        self._check(t, s)
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        lo = np.minimum(t, s)
        hi = np.maximum(t, s)
        out = np.sin(lo) * np.sin(self.T - hi) / self.sin_T
        return out[()] if out.ndim == 0 else out

    __call__ = eval

    def branch(self, t, s, side, derivative=0):
        """Analytic branch formula for ``d^k G / dt^k`` without domain checks.

        ``below`` is the ``t < s`` formula, ``above`` the ``t > s`` one.
        Quadrature rules use this to evaluate a branch at a node lying past
        its own region (the formulas are entire functions of ``t`` and ``s``).
        """
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        T = self.T
        if side == BELOW:
            if derivative == 0:
                num = np.sin(t) * np.sin(T - s)
            elif derivative == 1:
                num = np.cos(t) * np.sin(T - s)
            else:
                num = -np.sin(t) * np.sin(T - s)
        else:
            if derivative == 0:
                num = np.sin(s) * np.sin(T - t)
            elif derivative == 1:
                num = -np.sin(s) * np.cos(T - t)
            else:
                num = -np.sin(s) * np.sin(T - t)
        return num / self.sin_T

    def _onesided(self, t, s, side, derivative):
        self._check(t, s)
        if side not in (BELOW, ABOVE):
            raise ValueError(f"side must be {BELOW!r} or {ABOVE!r}, got {side!r}")
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        lower = self.branch(t, s, BELOW, derivative)
        upper = self.branch(t, s, ABOVE, derivative)
        use_lower = (t < s) if side == ABOVE else (t <= s)
        out = np.where(use_lower, lower, upper)
        return out[()] if out.ndim == 0 else out

    def bound(self):
        return 0.5 * np.tan(0.5 * self.T)

    def dt_onesided(self, t, s, side=BELOW):
        """One-sided ``dG/dt``.

        Off the diagonal the branch is picked by the sign of ``t - s`` and
        ``side`` is ignored.  On ``t == s``, ``side="below"`` takes the
        ``t < s`` branch and ``side="above"`` the ``t > s`` branch.
        """
        return self._onesided(t, s, side, 1)

    def d2t(self, t, s, side=BELOW):
        """Branchwise ``d^2G/dt^2``; same side convention as :meth:`dt_onesided`."""
        return self._onesided(t, s, side, 2)

    def derivative_jump(self, s):
        """``dt_onesided(s, s, above) - dt_onesided(s, s, below)``; analytically -1."""
        return self.dt_onesided(s, s, ABOVE) - self.dt_onesided(s, s, BELOW)


def make_kernel(T, eps_T=DEFAULT_EPS_T):
    return GreenKernel(float(T), eps_T)

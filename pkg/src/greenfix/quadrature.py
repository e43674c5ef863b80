"""Composite Simpson and Gauss-Legendre rules on a uniform mesh."""

import numpy as np

# one-interval rule exact for quadratics, using a node one step beyond the interval
_ONE_STEP = np.array([5.0, 8.0, -1.0]) / 12.0


def composite_weights(n, h):
    """Weights on ``n + 1`` equispaced nodes for ``n >= 2`` intervals of width ``h``.

    Even ``n`` is plain composite Simpson.  Odd ``n`` uses Simpson on the
    first ``n - 3`` intervals and the 3/8 rule on the last three, which
    keeps fourth order.
    """
    if n < 2:
        raise ValueError("composite rule needs at least two intervals")
    w = np.zeros(n + 1)
    even = n if n % 2 == 0 else n - 3
    if even:
        w[0:even + 1:2] += 2.0
        w[1:even:2] += 4.0
        w[0] -= 1.0
        w[even] -= 1.0
        w[: even + 1] *= h / 3.0
    if n % 2:
        w[n - 3:] += 3.0 * h / 8.0 * np.array([1.0, 3.0, 3.0, 1.0])
    return w


def one_step_weights(h):
    """Weights for ``[x0, x0 + h]`` on nodes ``x0, x0 + h, x0 + 2h``."""
    return h * _ONE_STEP


def gauss_legendre_nodes(mesh, order):
    """Gauss-Legendre nodes and weights on every interval of ``mesh``."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = mesh[:-1, None]
    b = mesh[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()

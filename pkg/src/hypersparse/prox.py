"""Proximal operators used by the edge-block splitting.

Every operator has a vector form and a row-batched form (suffix ``_rows``)
acting on a 2-D array with one radius/step per row. Rows may be zero-padded:
all operators here map zero entries to zero, so padding is harmless.
"""

import numpy as np


def _as_rows(v, tau):
    V = np.atleast_2d(np.asarray(v, dtype=float))
    t = np.broadcast_to(np.asarray(tau, dtype=float), (V.shape[0],))
    if np.any(t < 0):
        raise ValueError("radius / step must be nonnegative")
    return V, t


def project_l1_ball_rows(V, radius):
    """Euclidean projection of each row onto ``{u : ||u||_1 <= radius}``."""
    V, r = _as_rows(V, radius)
    A = np.abs(V)
    out = V.copy()
    outside = A.sum(axis=1) > r
    if not outside.any():
        return out
    Ao, ro = A[outside], r[outside]
    s = -np.sort(-Ao, axis=1)
    cs = np.cumsum(s, axis=1)
    j = np.arange(1, s.shape[1] + 1)
    theta = (cs - ro[:, None]) / j
    # last index where the sorted value still exceeds its threshold; the
    # largest entry always does, even when rounding hides a tiny radius
    above = s > theta
    above[:, 0] = True
    k = s.shape[1] - 1 - np.argmax(above[:, ::-1], axis=1)
    th = theta[np.arange(len(k)), k]
    proj = np.sign(V[outside]) * np.maximum(Ao - th[:, None], 0.0)
    proj[ro == 0] = 0.0
    out[outside] = proj
    return out


def project_l1_ball(v, radius):
    """Project ``v`` onto the l1 ball of the given radius (sorted-threshold method)."""
    v = np.asarray(v, dtype=float)
    return project_l1_ball_rows(v.reshape(1, -1), radius).reshape(v.shape)


def prox_l1_rows(V, tau):
    V, t = _as_rows(V, tau)
    return np.sign(V) * np.maximum(np.abs(V) - t[:, None], 0.0)


def prox_l1(v, tau):
    """Soft threshold, the prox of ``tau * ||u||_1``."""
    v = np.asarray(v, dtype=float)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def prox_linf_rows(V, tau):
    V, t = _as_rows(V, tau)
    return V - project_l1_ball_rows(V, t)


def prox_linf(v, tau):
    """Prox of ``tau * ||u||_inf`` by Moreau decomposition against the l1 ball."""
    v = np.asarray(v, dtype=float)
    return prox_linf_rows(v.reshape(1, -1), tau).reshape(v.shape)


def prox_sql1_rows(V, tau):
    V, t = _as_rows(V, tau)
    A = np.abs(V)
    s = -np.sort(-A, axis=1)
    cs = np.cumsum(s, axis=1)
    j = np.arange(1, s.shape[1] + 1)
    S = cs / (1.0 + 2.0 * t[:, None] * j)
    active = s > 2.0 * t[:, None] * S
    any_active = active.any(axis=1)
    k = s.shape[1] - 1 - np.argmax(active[:, ::-1], axis=1)
    Sk = np.where(any_active, S[np.arange(len(k)), k], 0.0)
    out = np.sign(V) * np.maximum(A - 2.0 * t[:, None] * Sk[:, None], 0.0)
    out[~any_active] = 0.0
    return out


def prox_sql1(v, tau):
    """Exact prox of ``tau * ||u||_1 ** 2``.

    The minimiser is a soft threshold at ``2 * tau * S`` where ``S`` is the l1
    norm of the result; ``S`` is found from the sorted magnitudes.
    """
    v = np.asarray(v, dtype=float)
    return prox_sql1_rows(v.reshape(1, -1), tau).reshape(v.shape)

"""Pure-Python Q-learning and Bellman kernels; the fallback for ``_kernels``."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _greedy(row) -> int:
    best = 0
    for a in range(1, len(row)):
        if row[a] > row[best]:
            best = a
    return best


def q_learning(Q, offsets, nxt, rew, cum, terminal, start, alpha, gamma, epsilon, U, history):
    """Run len(U) steps of epsilon-greedy Q-learning in place.

    Row index of (prev, s, a) is ``(prev * nS + s) * nA + a`` where prev is 0
    at the start of an episode and 1 + previous action otherwise; without
    history every row uses prev = 0. Returns visit counts.
    """
    nS, nA = Q.shape
    visits = np.zeros((nS, nA), dtype=np.int64)
    Ql = Q.tolist()
    off = offsets.tolist()
    nx = nxt.tolist()
    rw = rew.tolist()
    cm = cum.tolist()
    term = terminal.tolist()
    Ul = U.tolist()
    s, p = int(start), 0
    for u_explore, u_action, u_next in Ul:
        if u_explore < epsilon:
            a = min(int(u_action * nA), nA - 1)
        else:
            a = _greedy(Ql[s])
        i = ((p if history else 0) * nS + s) * nA + a
        lo, hi = off[i], off[i + 1]
        j = hi - 1
        for k in range(lo, hi):
            if u_next < cm[k]:
                j = k
                break
        s2, r = nx[j], rw[j]
        row = Ql[s]
        row[a] += alpha * (r + gamma * max(Ql[s2]) - row[a])
        visits[s, a] += 1
        if term[s2]:
            s, p = int(start), 0
        else:
            s, p = s2, 1 + a
    Q[:, :] = np.asarray(Ql, dtype=np.float64)
    return visits


def bellman(Q, offsets, nxt, rew, prob, gamma):
    """(BQ)(s,a) = sum_j p_j (r_j + gamma max_a' Q(s'_j, a')) over the base rows."""
    nS, nA = Q.shape
    vmax = Q.max(axis=1)
    out = np.empty_like(Q)
    for s in range(nS):
        for a in range(nA):
            i = s * nA + a
            acc = 0.0
            for j in range(offsets[i], offsets[i + 1]):
                acc += prob[j] * (rew[j] + gamma * vmax[nxt[j]])
            out[s, a] = acc
    return out

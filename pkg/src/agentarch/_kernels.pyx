# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Q-learning and Bellman kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

BACKEND = "cython"


cdef inline Py_ssize_t _greedy(double[:, ::1] Q, Py_ssize_t s, Py_ssize_t nA) nogil:
    cdef Py_ssize_t a, best = 0
    for a in range(1, nA):
        if Q[s, a] > Q[s, best]:
            best = a
    return best


def q_learning(double[:, ::1] Q, const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] nxt,
               const double[::1] rew, const double[::1] cum, const cnp.uint8_t[::1] terminal, long start,
               double alpha, double gamma, double epsilon, const double[:, ::1] U, bint history):
    cdef Py_ssize_t nS = Q.shape[0], nA = Q.shape[1], steps = U.shape[0]
    cdef cnp.int64_t[:, ::1] visits = np.zeros((nS, nA), dtype=np.int64)
    cdef Py_ssize_t t, a, i, j, k, lo, hi, s2, s = start, p = 0
    cdef double r, m
    with nogil:
        for t in range(steps):
            if U[t, 0] < epsilon:
                a = <Py_ssize_t>(U[t, 1] * nA)
                if a > nA - 1:
                    a = nA - 1
            else:
                a = _greedy(Q, s, nA)
            i = ((p if history else 0) * nS + s) * nA + a
            lo = offsets[i]
            hi = offsets[i + 1]
            j = hi - 1
            for k in range(lo, hi):
                if U[t, 2] < cum[k]:
                    j = k
                    break
            s2 = nxt[j]
            r = rew[j]
            m = Q[s2, 0]
            for k in range(1, nA):
                if Q[s2, k] > m:
                    m = Q[s2, k]
            Q[s, a] += alpha * (r + gamma * m - Q[s, a])
            visits[s, a] += 1
            if terminal[s2]:
                s = start
                p = 0
            else:
                s = s2
                p = 1 + a
    return np.asarray(visits)


def bellman(const double[:, ::1] Q, const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] nxt,
            const double[::1] rew, const double[::1] prob, double gamma):
    cdef Py_ssize_t nS = Q.shape[0], nA = Q.shape[1], s, a, i, j, k
    cdef double[::1] vmax = np.empty(nS)
    out_arr = np.empty((nS, nA))
    cdef double[:, ::1] out = out_arr
    cdef double acc, m
    with nogil:
        for s in range(nS):
            m = Q[s, 0]
            for k in range(1, nA):
                if Q[s, k] > m:
                    m = Q[s, k]
            vmax[s] = m
        for s in range(nS):
            for a in range(nA):
                i = s * nA + a
                acc = 0.0
                for j in range(offsets[i], offsets[i + 1]):
                    acc = acc + prob[j] * (rew[j] + gamma * vmax[nxt[j]])
                out[s, a] = acc
    return out_arr

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled particle-walk kernel.

Mirrors _pykernel exactly: same xorshift64* RNG and floating-point
operation order, so both backends produce bit-identical trajectories.
"""

import numpy as np
cimport numpy as cnp

BACKEND = "cython"

ctypedef unsigned long long u64

cdef u64 _MULT = 2685821657736338717ULL
cdef double _INV53 = 1.0 / 9007199254740992.0


def seed_state(seed):
    """Derive a nonzero 64-bit xorshift state from an arbitrary seed."""
    cdef u64 z = (<u64> seed) + 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    z = z ^ (z >> 31)
    if z == 0:
        z = 0x9E3779B97F4A7C15ULL
    return z


cdef inline u64 _next(u64 x) nogil:
    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    return x


cdef inline double _to_double(u64 x) nogil:
    return <double> ((x * _MULT) >> 11) * _INV53


cdef u64 _step(const long long[:] indptr, const int[:] indices,
               double[:, :] dom, const unsigned char[:] labeled,
               int[:, :] dist, const int[:] p_cls, int[:] p_curr,
               int[:] p_prev, double[:] p_strength, Py_ssize_t p,
               u64 rng_state) nogil:
    cdef Py_ssize_t q = p_curr[p]
    cdef int c = p_cls[p]
    cdef long long s = indptr[q]
    cdef long long e = indptr[q + 1]
    cdef long long deg = e - s
    if deg == 0:
        return rng_state

    cdef double greedy_total = 0.0
    cdef double dd, pj, acc, u, delta, total, sub
    cdef long long t
    cdef Py_ssize_t j, i, r
    cdef int n_cls = <int> dom.shape[1]
    cdef int nd
    cdef bint strict

    for t in range(s, e):
        j = indices[t]
        dd = 1.0 + dist[c, j]
        greedy_total += dom[j, c] / (dd * dd)

    rng_state = _next(rng_state)
    u = _to_double(rng_state)

    i = indices[e - 1]
    acc = 0.0
    for t in range(s, e):
        j = indices[t]
        if greedy_total > 0.0:
            dd = 1.0 + dist[c, j]
            pj = 0.5 / deg + 0.5 * (dom[j, c] / (dd * dd)) / greedy_total
        else:
            pj = 1.0 / deg
        acc += pj
        if u < acc:
            i = j
            break

    if not labeled[i]:
        delta = 0.1 * p_strength[p] / (n_cls - 1)
        total = 0.0
        for r in range(n_cls):
            if r == c:
                continue
            sub = dom[i, r] if dom[i, r] < delta else delta
            dom[i, r] -= sub
            total += sub
        dom[i, c] += total
        if dom[i, c] > 1.0:  # accumulated rounding can overshoot by one ulp
            dom[i, c] = 1.0
    p_strength[p] = dom[i, c]

    nd = dist[c, q] + 1
    if nd < dist[c, i]:
        dist[c, i] = nd

    strict = True
    for r in range(n_cls):
        if r != c and dom[i, r] >= dom[i, c]:
            strict = False
            break
    if strict:
        p_prev[p] = <int> q
        p_curr[p] = <int> i
    return rng_state


def step_particle(long long[:] indptr, int[:] indices, double[:, :] dom,
                  unsigned char[:] labeled, int[:, :] dist, int[:] p_cls,
                  int[:] p_curr, int[:] p_prev, double[:] p_strength,
                  Py_ssize_t p, rng_state):
    """One visit of particle p; mutates the state arrays in place."""
    return _step(indptr, indices, dom, labeled, dist, p_cls, p_curr, p_prev,
                 p_strength, p, <u64> rng_state)


def run_rounds(long long[:] indptr, int[:] indices, double[:, :] dom,
               unsigned char[:] labeled, int[:, :] dist, int[:] p_cls,
               int[:] p_curr, int[:] p_prev, double[:] p_strength,
               Py_ssize_t n_rounds, rng_state):
    """n_rounds rounds; each particle takes one step per round, in order."""
    cdef u64 state = <u64> rng_state
    cdef Py_ssize_t n_particles = p_cls.shape[0]
    cdef Py_ssize_t rnd, p
    with nogil:
        for rnd in range(n_rounds):
            for p in range(n_particles):
                state = _step(indptr, indices, dom, labeled, dist, p_cls,
                              p_curr, p_prev, p_strength, p, state)
    return state

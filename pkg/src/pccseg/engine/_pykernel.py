"""Pure-Python particle-walk kernel.

Bit-identical fallback for the compiled kernel: same xorshift64* RNG, same
floating-point operation order. Slow, but it keeps the package usable when
the extension is not built and serves as the reference in the backend
benchmark.
"""

from __future__ import annotations

BACKEND = "python"

_MASK = 0xFFFFFFFFFFFFFFFF
_MULT = 2685821657736338717
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def seed_state(seed: int) -> int:
    """Derive a nonzero 64-bit xorshift state from an arbitrary seed."""
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z or 0x9E3779B97F4A7C15


def _next(x: int) -> int:
    x ^= x >> 12
    x = (x ^ (x << 25)) & _MASK
    x ^= x >> 27
    return x


def _to_double(x: int) -> float:
    return (((x * _MULT) & _MASK) >> 11) * _INV53


def step_particle(indptr, indices, dom, labeled, dist, p_cls, p_curr, p_prev,
                  p_strength, p: int, rng_state: int) -> int:
    """One visit of particle p; mutates the state arrays in place."""
    q = p_curr[p]
    c = p_cls[p]
    s = indptr[q]
    e = indptr[q + 1]
    deg = e - s
    if deg == 0:
        return rng_state

    greedy_total = 0.0
    for t in range(s, e):
        j = indices[t]
        dd = 1.0 + dist[c, j]
        greedy_total += dom[j, c] / (dd * dd)

    rng_state = _next(rng_state)
    u = _to_double(rng_state)

    chosen = indices[e - 1]
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
            chosen = j
            break
    i = chosen

    n_cls = dom.shape[1]
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
        p_prev[p] = q
        p_curr[p] = i
    return rng_state


def run_rounds(indptr, indices, dom, labeled, dist, p_cls, p_curr, p_prev,
               p_strength, n_rounds: int, rng_state: int) -> int:
    """n_rounds rounds; each particle takes one step per round, in order."""
    n_particles = len(p_cls)
    for _ in range(n_rounds):
        for p in range(n_particles):
            rng_state = step_particle(indptr, indices, dom, labeled, dist,
                                      p_cls, p_curr, p_prev, p_strength, p,
                                      rng_state)
    return rng_state

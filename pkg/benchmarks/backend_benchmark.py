"""Compare the compiled and pure-Python particle-walk kernels.

Runs the same rounds on the same graph with both backends, checks the
final states are bit-identical, and reports the speedup.

Usage: python3 benchmarks/backend_benchmark.py [--nodes N] [--rounds R]
"""

import argparse
import time

import numpy as np

from pccseg.engine import _pykernel
from pccseg.engine import kernel as active_kernel
from pccseg.engine.core import init_state
from pccseg.graph import build_graph_from_points


def make_state(n_nodes: int, seed: int):
    rng = np.random.default_rng(seed)
    X = rng.normal(0, 1, (n_nodes, 6))
    labels = np.full(n_nodes, -1, dtype=np.int8)
    for cls in (0, 1):
        labels[rng.choice(n_nodes, 10, replace=False)] = cls
    g = build_graph_from_points(X, labels, k=10)
    return init_state(g, seed=seed)


def run(backend, state, n_rounds: int):
    t0 = time.perf_counter()
    state.rng_state = backend.run_rounds(
        state.graph.indptr, state.graph.indices, state.dom, state.labeled,
        state.dist, state.p_cls, state.p_curr, state.p_prev,
        state.p_strength, n_rounds, state.rng_state)
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=2000)
    parser.add_argument("--rounds", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = [("python", _pykernel)]
    try:
        from pccseg.engine import _kernel
        backends.append(("compiled", _kernel))
    except ImportError:
        print("compiled kernel not built; timing the pure-Python backend only")
    print(f"active backend: {active_kernel.BACKEND}")

    states, times = {}, {}
    for name, backend in backends:
        state = make_state(args.nodes, args.seed)
        times[name] = run(backend, state, args.rounds)
        states[name] = state
        steps = args.rounds * len(state.p_cls)
        print(f"{name:>9}: {times[name]:8.3f}s  "
              f"({steps / times[name]:,.0f} steps/s)")

    if len(states) == 2:
        a, b = states["python"], states["compiled"]
        same = (a.rng_state == b.rng_state
                and np.array_equal(a.dom, b.dom)
                and np.array_equal(a.dist, b.dist)
                and np.array_equal(a.p_curr, b.p_curr)
                and np.array_equal(a.p_strength, b.p_strength))
        print(f"bit-identical final state: {same}")
        if not same:
            raise SystemExit("backend mismatch")
        print(f"speedup: {times['python'] / times['compiled']:.1f}x")


if __name__ == "__main__":
    main()

"""Compare the compiled and NumPy message kernels.

Run with ``python benchmarks/bench_kernels.py``. Timings are per call,
best of several repeats, on graphs at the system sizes used in the acceptance tests.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from impulse_mud import SystemParams, add_awgn, build_slot_matrix, generate_hopping, transmit
from impulse_mud.codes import bundled_ldpc
from impulse_mud.detectors import CLAMP, MAX_COLLIDING, _backend, build_graph, detect_cfg3, detect_fg3


def make_case(users, frames, code, seed):
    rng = np.random.default_rng(seed)
    params = SystemParams(users, 20, frames)
    slot = build_slot_matrix(generate_hopping(params, rng), params)
    graph = build_graph(slot, params, code)
    symbols = rng.choice([-1.0, 1.0], (users, frames))
    samples = add_awgn(transmit(slot, params, symbols), 0.6, rng)
    return graph, samples


def best(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = [b for b in (_backend.python, _backend.compiled) if b is not None]
    if len(backends) == 1:
        print("compiled kernels not built; timing the NumPy backend only")
    code = bundled_ldpc()
    cases = {
        "FG3 K=20 Nf=3": make_case(20, 3, None, 1),
        "CFG3 K=20 n=120": make_case(20, code.n, code, 2),
        "CFG3 K=40 n=120": make_case(40, code.n, code, 3),
    }
    rows = []
    for name, (graph, samples) in cases.items():
        y = graph.samples_at_nodes(samples.samples)
        prior = np.random.default_rng(0).normal(0, 3, graph.n_edges)
        timings = {}
        for kern in backends:
            p = best(lambda: kern.p_messages(y, graph.node_ptr, graph.edge_amp, prior, 0.36, CLAMP, MAX_COLLIDING),
                     args.repeat)
            if graph.code is not None:
                v2c = np.random.default_rng(1).normal(0, 3, graph.chk_var.size)
                c = best(lambda: kern.check_messages(graph.chk_ptr, v2c, CLAMP), args.repeat)
                full = best(lambda: detect_cfg3(graph, samples, iterations=8, backend=kern.name), args.repeat)
            else:
                c = float("nan")
                full = best(lambda: detect_fg3(graph, samples, 8, backend=kern.name), args.repeat)
            timings[kern.name] = (p, c, full)
        rows.append((name, timings))

    print(f"{'case':<18} {'backend':<8} {'p_messages':>12} {'check_msgs':>12} {'detector':>12} {'speedup':>8}")
    for name, timings in rows:
        base = timings["python"][2]
        for backend, (p, c, full) in timings.items():
            check = "-" if np.isnan(c) else f"{c * 1e6:.1f} us"
            print(f"{name:<18} {backend:<8} {p * 1e6:>9.1f} us {check:>12} {full * 1e3:>9.2f} ms {base / full:>7.1f}x")


if __name__ == "__main__":
    main()

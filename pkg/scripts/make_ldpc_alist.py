"""Generate the bundled (n=120, m=64) column-weight-3 LDPC alist.

Columns get three distinct checks, row weights are kept within one of
each other and length-4 cycles are rejected. The construction is seeded,
so rerunning reproduces the shipped file.

    python scripts/make_ldpc_alist.py > src/impulse_mud/data/ldpc_120_64_3.alist
"""
import sys

import numpy as np

from impulse_mud.codes import LinearCode, emit_alist, gf2_rank


def build(n=120, m=64, wc=3, seed=109, attempts=2000):
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        h = np.zeros((m, n), dtype=np.uint8)
        ok = True
        for j in range(n):
            weights = h.sum(axis=1)
            chosen = []
            for _ in range(wc):
                # lightest rows first, random among ties, no shared pair with earlier columns
                order = rng.permutation(m)
                order = order[np.argsort(weights[order], kind="stable")]
                for r in order:
                    if r in chosen:
                        continue
                    if any((h[r, :j] & h[c, :j]).any() for c in chosen):
                        continue
                    chosen.append(r)
                    break
                else:
                    ok = False
                    break
            if not ok:
                break
            h[chosen, j] = 1
        if ok and gf2_rank(h) == m:
            return h
    raise RuntimeError("no valid matrix found")


if __name__ == "__main__":
    code = LinearCode.from_parity_check(build())
    sys.stdout.write(emit_alist(code))

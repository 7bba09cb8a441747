#!/usr/bin/env python3
"""Smoke test for the regulus_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p regulus-py` (debug or release), stages it under the module
name Python expects, imports it, and exercises the main entry points.
"""

import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libregulus_py.so", "regulus_py.so", "libregulus_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("cdylib not found; run `cargo build -p regulus-py` first")
    stage = Path(tempfile.mkdtemp(prefix="regulus-py-"))
    shutil.copy2(built, stage / "regulus_py.so")
    sys.path.insert(0, str(stage))
    import regulus_py

    return regulus_py


def main():
    rp = load_module()

    # Complete bipartite K_{8,8} as a plain graph.
    edges = [(a, 8 + b) for a in range(8) for b in range(8)]
    g = rp.Graph(16, edges)
    assert g.vertex_count == 16 and g.edge_count == 64
    assert g.degree(0) == 8

    # Round-trip through the text format.
    assert rp.Graph.parse(g.to_text()).edge_count == 64

    # Full pipeline at r=3, certified 3-regular.
    w = rp.extract(g, r=3, method="es", seed=5)
    assert w.regular_degree == 3
    assert len(set(w.vertices)) == len(w.vertices)
    degs = {}
    for u, v in w.edges:
        degs[u] = degs.get(u, 0) + 1
        degs[v] = degs.get(v, 0) + 1
    assert all(d == 3 for d in degs.values()), degs
    assert rp.verify(g, w, 3) is True
    assert w.stages, "trace should not be empty"

    # The other routes.
    assert rp.extract(g, r=2, method="logn", seed=1).regular_degree == 2
    assert rp.extract(g, r=2, method="hyper", seed=1).regular_degree == 2
    ar = rp.extract(g, method="almostreg")
    assert ar.degree_ratio is not None and ar.degree_ratio <= 4.0

    # Exact oracle answers.
    assert rp.exists_regular(g, 8) is True
    path = rp.Graph(7, [(i, i + 1) for i in range(6)])
    assert rp.exists_regular(path, 2) is False
    assert rp.max_regular_degree(g) == 8

    # Verification is not a rubber stamp.
    try:
        rp.verify(g, w, 4)
    except ValueError:
        pass
    else:
        sys.exit("verify accepted a wrong degree")

    # Synthetic host generation is deterministic.
    h1, report1 = rp.generate("large_r", n=512, r=8, seed=7)
    h2, report2 = rp.generate("large_r", n=512, r=8, seed=7)
    assert h1.vertex_count == 512
    assert h1.edges() == h2.edges()
    assert report1 == report2 and '"edge_count"' in report1

    # Errors surface as Python exceptions.
    try:
        rp.extract(path, r=2, method="es", seed=0)
    except RuntimeError:
        pass
    else:
        sys.exit("route failure should raise RuntimeError")
    try:
        rp.Graph(2, [(0, 5)])
    except ValueError:
        pass
    else:
        sys.exit("out-of-range edge should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()

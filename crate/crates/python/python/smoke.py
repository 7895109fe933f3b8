"""Smoke test for the pyspinent extension module.

Build and run from the repository root:

    cargo build -p spinent-py
    python3 crates/python/python/smoke.py target/debug

The optional argument is a directory holding the built library; it is copied
to a temporary directory as ``pyspinent.so`` before import. Without it the
installed module is imported (for example after ``maturin develop``).
"""

import importlib
import math
import os
import shutil
import sys
import tempfile


def load(build_dir):
    if build_dir is None:
        return importlib.import_module("pyspinent")
    for name in ("libpyspinent.so", "libpyspinent.dylib", "pyspinent.dll"):
        src = os.path.join(build_dir, name)
        if os.path.exists(src):
            break
    else:
        sys.exit(f"no built pyspinent library in {build_dir}")
    tmp = tempfile.mkdtemp()
    shutil.copy(src, os.path.join(tmp, "pyspinent.pyd" if name.endswith(".dll") else "pyspinent.so"))
    sys.path.insert(0, tmp)
    return importlib.import_module("pyspinent")


def main():
    ps = load(sys.argv[1] if len(sys.argv) > 1 else None)

    chain = ps.Lattice.chain(8)
    assert chain.num_sites == 8 and len(chain.bonds) == 8
    assert ps.Lattice.square(4, 4).geometry == "4x4"

    gs = ps.ground_state(ps.Model.xxz_half(0.0), chain)
    oracle = ps.xx_oracle(8)
    assert abs(gs.energy - oracle["energy"]) < 1e-8
    c = gs.correlators(0, 1)
    assert abs(c["cxx"] - oracle["cxx"]) < 1e-8
    rho = gs.rdm(0, 1)
    assert abs(sum(rho[k][k] for k in range(4)) - 1.0) < 1e-10
    assert 0.0 < gs.entropy(0, 1) < 2.0
    assert 0.0 < gs.concurrence(0, 1) < 1.0

    bethe = ps.bethe_ground(12, 0.5)
    ed = ps.ground_state(ps.Model.xxz_half(0.5), ps.Lattice.chain(12))
    assert abs(bethe["energy"] - ed.energy) < 1e-8

    levels = ps.lowest_levels(ps.Model.blbq(1.5 * math.pi), ps.Lattice.chain(6), 9)
    assert all(abs(e - levels[1][0]) < 1e-8 for e, _ in levels[1:])

    rows = ps.sweep("xxz-half", [8], -1.5, 1.5, 7)
    assert len(rows) == 7 and rows[0]["ev"] == 0.0 and rows[0]["degenerate_flag"]

    try:
        ps.Lattice.chain(1)
    except ValueError:
        pass
    else:
        raise AssertionError("chain(1) accepted")

    print(f"pyspinent {ps.__version__}: smoke test passed")


if __name__ == "__main__":
    main()

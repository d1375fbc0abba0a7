#!/usr/bin/env python3
"""Smoke test for the bzl_py extension module.

Builds the cdylib with cargo, copies it next to this script under the
importable name, then exercises the main types and operations end to end.
Exits nonzero on any failure.
"""

import math
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> None:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "bzl-py"], cwd=ROOT, check=True
    )
    built = ROOT / "target" / "release" / "libbzl_py.so"
    if not built.exists():  # macOS
        built = ROOT / "target" / "release" / "libbzl_py.dylib"
    shutil.copy(built, Path(__file__).resolve().parent / "bzl_py.so")


def main() -> None:
    build_extension()
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    import bzl_py

    # Weight families and equilibrium geometry.
    w = bzl_py.Weight.gaussian(scale=0.5)
    assert abs(w.eval(10, 1 + 0j) - 0.5) < 1e-15
    inner, outer = w.equilibrium_radii(10)
    assert inner == 0.0 and abs(outer - 1.0) < 1e-9, (inner, outer)

    quartic = bzl_py.Weight.power(2)
    _, outer4 = quartic.equilibrium_radii(10)
    assert abs(outer4 - 1.0) < 1e-9

    # Hypothesis check: bump family passes, sin family fails.
    bump = bzl_py.Weight.gaussian_bump(-0.5)
    assert bump.check_hypotheses([16, 32, 64])["all_ok"]
    assert not bzl_py.Weight.sin_perturbed().check_hypotheses([16, 32, 64])["all_ok"]

    # Kernel diagnostics at n = 20.
    b = bzl_py.Basis(w, 20)
    assert b.n == 20 and b.dimension == 21
    assert abs(b.bergman_function(0j) - 20 / math.pi) < 1e-9
    assert abs(b.tyz_ratio(0j) - 1.0) < 1e-10
    assert abs(b.correlation(0.2 + 0.1j, 0.2 + 0.1j) - 1.0) < 1e-12
    assert b.in_bulk(0.5 + 0j) and not b.in_bulk(1.5 + 0j)
    rho = abs(b.correlation(0j, 0.5 + 0j))
    assert abs(rho - math.exp(-20 * 0.25 / 2)) < 1e-3

    # Zeros: count and determinism.
    roots_a = b.sample_roots(7, 0)
    roots_b = b.sample_roots(7, 0)
    assert len(roots_a) == 20 and roots_a == roots_b

    # Dual-route linear statistic agreement (Poincaré-Lelong).
    s_root, s_log = b.dual_statistics(7, 0, 0j, 0.5)
    assert abs(s_root - s_log) / (1 + abs(s_root)) < 1e-3, (s_root, s_log)

    # Condition (c1) close to the Gaussian oracle 2π/n.
    c1 = bzl_py.condition_c1(b, 0j, 0.7, grid_size=6)
    assert 0.5 * 2 * math.pi / 20 < c1 < 1.5 * 2 * math.pi / 20, c1

    # Small CLT ensemble: moments in a sane range, deterministic.
    s = bzl_py.run_ensemble(w, n=20, trials=200, seed=3, radius=0.5)
    assert s["trials"] == 200 and s["variance"] > 0
    assert abs(s["skewness"]) < 1.0 and s["ks_p"] > 1e-4
    s2 = bzl_py.run_ensemble(w, n=20, trials=200, seed=3, radius=0.5)
    assert s["standardized"] == s2["standardized"]

    print("bzl_py smoke test passed")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Smoke test for the `polycone` Python extension.

Builds nothing itself: it locates the compiled cdylib under `target/`,
copies it next to a temp directory under the importable name, and
exercises the main entry points end to end.  Exit code 0 means every
check passed.

Usage:
    cargo build -p polycone-py          # or --release
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "libpolycone_py.so",
        REPO / "target" / "debug" / "libpolycone_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("no compiled extension found; run `cargo build -p polycone-py` first")
    stage = Path(tempfile.mkdtemp(prefix="polycone-smoke-"))
    shutil.copy2(built[0], stage / "polycone.so")
    sys.path.insert(0, str(stage))
    import polycone

    return polycone


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    pc = load_module()
    print(f"loaded polycone {pc.__version__}")

    # Canonical weights for degree 3: both equal 1/sqrt(3).
    w = pc.default_weights(2)
    assert len(w) == 2 and all(approx(x, 1 / math.sqrt(3)) for x in w), w
    print("ok: canonical weights")

    # Basis round trip keeps the polynomial.
    coeffs = [1 + 2j, 0.5 - 1j, -3 + 0.25j, 2j]
    p = pc.Poly(2, coeffs, basis="zw")
    assert p.n == 2 and p.degree == 3
    back = pc.Poly(2, p.coeffs("xy"), basis="xy").coeffs("zw")
    assert all(approx(a, b) for a, b in zip(coeffs, back)), back
    print("ok: basis round trip")

    # Frozen pairing value at n = 1: weights are (1,), so
    # q((1,1), (1,1)) = (1/2)(1*1 + 1*1) = 1.
    one = pc.Poly(1, [1, 1])
    assert approx(pc.pairing(one, one), 1.0)
    # The pairing modulus is invariant under the rotation subgroup.
    theta = 0.73
    c, s = math.cos(theta), math.sin(theta)
    rotated = pc.mobius_act(c, -s, s, c, p)
    assert approx(abs(pc.pairing(rotated, rotated)), abs(pc.pairing(p, p)), 1e-10)
    print("ok: pairing values and rotation invariance")

    # A positive pointwise margin, and the randomized certificate.
    assert pc.margin(p) > 0.0
    passed, min_margin = pc.certify_margin(1, 2000, seed=42)
    assert passed and min_margin > 1e-4, (passed, min_margin)
    print(f"ok: margin certificate (min {min_margin:.4f})")

    # Cone samples develop to polynomials that avoid the forbidden set;
    # at the base point i the image is isotropic for the pairing.
    for field in ("c", "r"):
        t = pc.sample_cone(2, 3, field=field, seed=9)[1]
        q = pc.develop(0.3, 1.2, t)
        roots = q.sphere_roots()
        assert len(roots) == 3
        member, mult, ambiguous = q.in_k()
        assert not member and not ambiguous and mult < 2, (member, mult, ambiguous)
        at_base = pc.develop(0.0, 1.0, t)
        assert abs(pc.pairing(at_base, at_base)) <= 1e-10 * at_base.norm() ** 2
    print("ok: developing map onto the cone")

    # Flat-connection diagnostics.
    assert pc.hitchin_residual(2, 0.3, 0.9) <= 1e-10
    assert pc.holonomy_defect(2, 0.0, 1.0, 0.4) <= 1e-6
    print("ok: flat connection residuals")

    # n = 2 parameter chart round trip, including the infinity branch.
    roots = pc.n2_forward(1.0, 0.7, 0.9)
    tp, r, phi = pc.n2_inverse(roots)
    assert approx(tp, 1.0, 1e-9) and approx(r, 0.7, 1e-9) and approx(phi, 0.9, 1e-9)
    roots_inf = pc.n2_forward(math.pi / 2, 0.7, 0.9)
    assert any(x is None for x in roots_inf), roots_inf
    tp, r, phi = pc.n2_inverse(roots_inf)
    assert approx(tp, math.pi / 2, 1e-9) and approx(r, 0.7, 1e-9)
    print("ok: n = 2 chart round trips")

    # Error paths surface as ValueError.
    for bad in (
        lambda: pc.Poly(2, [1, 2, 3]),
        lambda: pc.n2_inverse([0.0, 1.0]),
        lambda: pc.develop(0.0, -1.0, [1, 0, 0, 0]),
        lambda: pc.Poly(2, coeffs, basis="uv"),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    print("ok: error paths")

    print("smoke test passed")


if __name__ == "__main__":
    main()

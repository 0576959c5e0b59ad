"""Smoke test for the curvcomp_py extension.

Build and install it first:

    pip install --no-build-isolation -e crates/py
"""

import json
import math

import curvcomp_py as cc


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    flat = cc.Space.constant(0.0)
    ellipse = cc.Body.offset_ellipse(flat, 1.2, 1.0)
    k = ellipse.kn_range(flat)
    close(k["k_max"], 1.2, 1e-12)
    close(k["k_min"], 1.0 / 1.44, 1e-12)
    close(ellipse.normal_curvature(flat, 0.0), 1.2, 1e-12)

    angle = cc.verify_angle(ellipse, flat, 0.0, 0.999999 * k["k_min"])
    assert angle["pass"] and len(angle["rows"]) == 64

    sphere = cc.Space.constant(1.0)
    r = 0.7
    body = cc.Body.offset_sphere(sphere, r, 0.3)
    lam = sphere.sphere_curvature(r)
    close(lam, math.cos(r) / math.sin(r), 1e-14)
    close(cc.radius_for_curvature(1.0, lam), r, 1e-12)
    dual = cc.verify_dual(body, sphere, 1.0, lam)
    assert max(abs(row["margin"]) for row in dual["angle"]["rows"]) <= 1e-9

    assert cc.riccati_residual(ellipse, flat) <= 1e-8
    assert all(m["pass"] for m in cc.verify_monotone(ellipse, flat, 0.0, 0.999999 * k["k_min"], tol=1e-9))

    roll = cc.check_rolling(ellipse, flat, "B", 1.2, n_p=64, n_x=1024)
    assert roll["pass"], roll["min_margin"]
    try:
        cc.check_rolling(ellipse, flat, "B", 1.0, n_p=64, n_x=1024)
    except cc.HypothesisError:
        pass
    else:
        raise AssertionError("lambda below k_max must be rejected")

    try:
        cc.radius_for_curvature(-1.0, 0.5)
    except cc.NoCompactSphereError as e:
        assert isinstance(e, cc.CurvcompError)
    else:
        raise AssertionError("expected NoCompactSphereError")

    circle = cc.Body.fourier(sphere, math.pi / 6, [])
    polar = cc.polar_check(circle, sphere)
    assert polar["pass"] and polar["involution"] <= 1e-8

    space3 = cc.Space.constant(0.0, dim=3)
    prolate = cc.Body.offset_ellipse(space3, 1.2, 1.0, revolution=True)
    proj = cc.projection_check(prolate, space3, [0.0, 1.0, 0.0])
    close(proj["max_shadow_curvature"], 1.2, 1e-4)

    scene = {
        "space": {"kind": "constant", "c": 0.0},
        "surface": {"kind": "offset_ellipse", "a": 1.2, "b": 1.0},
        "check": {"kind": "roll_b", "lambda": 1.0},
        "sampling": {"n_p": 64, "n_x": 1024},
    }
    report = cc.run_scene(json.dumps(scene))
    assert report["exit_code"] == 1 and report["error"]["class"] == "hypothesis"
    scene["check"]["lambda"] = 1.2
    report = cc.run_scene(json.dumps(scene))
    assert report["exit_code"] == 0 and report["pass"]
    assert report["schema_version"] == 1

    print("curvcomp_py smoke test passed")


if __name__ == "__main__":
    main()

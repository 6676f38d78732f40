"""Smoke test for the mixcurv Python extension.

Build the module first (see README), then run:

    python python/smoke_test.py
"""

import json
import math

import mixcurv


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    square = mixcurv.Polytope.from_vertices([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert square.dim == 2
    assert square.f_vector() == [4, 4, 1]
    assert close(square.volume(), 1.0)
    assert square.contains([0.5, 0.5])

    v = mixcurv.intrinsic_volumes(square)
    assert all(close(a, b) for a, b in zip(v, [1.0, 2.0, 1.0])), v

    cube = mixcurv.Polytope.from_json(
        json.dumps({"dim": 3, "vertices": [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]})
    )
    c1 = mixcurv.curvature_measure(cube, 1)
    assert c1.exact and close(c1.value, 3.0), c1

    local = mixcurv.curvature_measure(square, 1, region=json.dumps({"box": {"lower": [-1, -1], "upper": [0.5, 2]}}))
    assert close(float(local), 1.0), local

    m = mixcurv.mixed_curvature_measure([square, square], [1, 1])
    assert close(m.value, 2.0), m
    m = mixcurv.mixed_curvature_measure([cube, cube, cube], [2, 2, 2])
    assert close(m.value, 6.0), m

    cap = json.dumps({"cap": {"axis": [1, 1, 1], "angle": 1.0}})
    a = mixcurv.curvature_measure(cube, 0, directions=cap, samples=20000, seed=3)
    b = mixcurv.curvature_measure(cube, 0, directions=cap, samples=20000, seed=3)
    assert a.value == b.value and a.std_error > 0
    cap_area = 2 * math.pi * (1 - math.cos(1.0)) / (4 * math.pi)
    assert abs(a.value - cap_area) < 5 * a.std_error + 1e-3, (a, cap_area)

    spec = {
        "polytopes": [json.loads(square.to_json())] * 2,
        "k": 1,
        "integrator": {"grid": {"step": 0.01}},
    }
    report = json.loads(mixcurv.tif_verify(json.dumps(spec)))
    assert close(report["rhs"]["value"], 4.0)
    assert abs(report["lhs"]["value"] - 4.0) < 1e-2, report["lhs"]

    signs = json.loads(mixcurv.run_verify("signs"))
    assert signs["passed"] and signs["seed"] == mixcurv.DEFAULT_SEED

    try:
        mixcurv.mixed_curvature_measure([square, square], [0, 1])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid orders accepted")
    try:
        mixcurv.run_verify("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown suite accepted")

    print("mixcurv smoke test passed")


if __name__ == "__main__":
    main()

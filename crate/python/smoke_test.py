"""Smoke test for the adjlab Python module.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`, then run
`python python/smoke_test.py`.
"""

import math

import adjlab


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    a1 = adjlab.RootSystem("A1")
    assert a1.dominant_weights(4) == [[0], [2], [4]]
    re, im = a1.character([2], [math.pi / 2])
    assert close(re, -1 / 3) and close(im, 0.0)

    g2 = adjlab.RootSystem("G2")
    assert (g2.rank, g2.dim, g2.weyl_order()) == (2, 14, 12)
    assert g2.weyl_dimension([1, 0]) == 7
    re, im = g2.haar_integral([1, 0], 64)
    assert abs(complex(re, im)) < 1e-9

    alg = adjlab.LieAlgebra("A2")
    x = alg.random_unit_vector(1)
    back = alg.log(alg.exp([0.3 * v for v in x]))
    assert max(abs(b - 0.3 * v) for b, v in zip(back, x)) < 1e-9
    assert alg.jacobi_residual() < 1e-10

    found = alg.find_vanishing_tuple(x, 2)
    assert found["rank"] == 8 and found["residual"] < 1e-8
    _, rank = alg.orbit_sum(x, found["elements"])
    assert rank == 8

    report = alg.class_power_identity_check(x, 0.3, 3, 0)
    assert report["reachable"] and report["interior"]
    assert 1.95 <= alg.bch_exponent([alg.random_unit_vector(3), alg.random_unit_vector(4)]) <= 2.05

    est = adjlab.estimate_c("A1", 20, 2000)
    assert close(est["c_hat"], -1 / 3) and est["lambda"] == [2]
    assert close(adjlab.disk_requirement_of((-0.5, 0.0)), -0.5)

    ph = adjlab.pigeonhole(0.47, 0.45, 0.55, 2)
    assert 2 <= ph["k"] <= ph["k_bound"]
    assert math.cos(2 * math.pi * ph["k"] * 0.47) <= 0

    pts, dist = adjlab.lattice_walk([0.3, 0.7], 100)
    assert len(pts) == 100 and max(dist) <= 2.0
    print("adjlab smoke test passed")


if __name__ == "__main__":
    main()

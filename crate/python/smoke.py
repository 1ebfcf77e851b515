"""Smoke test for the pyabelsob extension.

Build and install first:  pip install ./crates/python  (or maturin develop)
"""

import cmath
import math

import pyabelsob as ab


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    g = ab.Group("Z4")
    assert g.order == 4 and g.factors == [4]

    # scaled Dirac -> flat spectrum
    spec = ab.dft(g, [1, 0, 0, 0])
    assert all(close(c, 0.25, 1e-15) for c in spec)

    c = ab.constants(g, 1.0, alpha=2.0)
    assert close(c["sup"], math.sqrt(2.2), 1e-15)
    assert close(c["lalpha"], (1 + 0.25 + 0.04 + 0.25) ** 0.25, 1e-15)

    # fast and naive transforms agree and invert
    z = ab.Group("Z2xZ3xZ5")
    f = [cmath.exp(1j * k * 0.7) + 0.1 * k for k in range(z.order)]
    fast, naive = ab.dft(z, f), ab.dft(z, f, naive=True)
    assert max(abs(a - b) for a, b in zip(fast, naive)) < 1e-12
    back = ab.idft(z, fast)
    assert max(abs(a - b) for a, b in zip(back, f)) < 1e-12

    # isometry of the linear solve
    z64 = ab.Group("Z64")
    lc = ab.StringOperator(z64, "sym-euclid", 0.5)
    rhs = [math.cos(2 * math.pi * k / 64) for k in range(64)]
    u, rep = lc.solve_with_report(rhs)
    assert rep["isometry_ok"] and rep["sup_ok"]
    assert close(rep["hcinf_u"], ab.lp_norm(z64, rhs, 2.0), 1e-12)
    # with a mild multiplier the round trip survives plain lists
    z16 = ab.Group("Z16")
    mild = ab.StringOperator(z16, "sym-euclid", 0.05)
    g16 = [math.sin(2 * math.pi * k / 16) for k in range(16)]
    assert max(abs(a - b) for a, b in zip(mild.apply(mild.solve(g16)), g16)) < 1e-12

    # small-data quadratic problem
    phi, rep = ab.solve_nonlinear(z64, "forced-power:2,0.1", forcing_norm=0.01)
    assert rep["converged"] and rep["iterations"] < 50
    assert rep["final_residual_eq"] < 1e-10
    assert len(phi) == 64

    # large data fails loudly
    try:
        ab.solve_nonlinear(ab.Group("Z16"), "forced-power:2,5", forcing_norm=50, c=0.1, max_iter=40)
    except RuntimeError:
        pass
    else:
        raise AssertionError("expected a convergence failure")

    res = ab.run_checks(seed=7, samples=8, translation_samples=2)
    assert res["passed"], [p["name"] for p in res["properties"] if not p["passed"]]

    print(f"pyabelsob {ab.__version__}: smoke test passed")


if __name__ == "__main__":
    main()

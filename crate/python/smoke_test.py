"""Smoke test for the pydescm extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import math
import os
import tempfile

import pydescm


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok   {what}")


def main():
    check(abs(pydescm.lambert_w0(10.0) - 1.7455280027406994) < 1e-15, "lambert_w0(10)")
    check(pydescm.sinc(1.0) == 0.0, "sinc vanishes at integers")
    check(abs(pydescm.bessel_zero(1, 1) - 3.8317059702075123) < 1e-14, "first zero of J_1")
    check(pydescm.eval_expression("2+3*4", 0.0) == 14.0, "expression precedence")

    mu = pydescm.solve_generalized([[2.0, 1.0], [1.0, 2.0]], [1.0, 4.0])
    check(abs(mu[0] - (10 - math.sqrt(52)) / 8) < 1e-14, "generalized 2x2 eigenvalue")

    bessel = pydescm.builtin("bessel", {"n": 7})
    check(bessel.params == {"n": 7.0}, "problem parameters")
    ref = bessel.reference_eigenvalue(1)
    check(abs(ref - 122.9076002036162) < 1e-10, "Bessel reference eigenvalue")
    records = bessel.study("de-balanced", list(range(4, 21)))
    best = min(r.abs_error for r in records)
    check(best < 1e-10, f"Bessel balanced DE reaches {best:.1e}")
    check(all(r.size == r.M + r.N + 1 for r in records), "record sizes")
    kappa_hat, r2 = pydescm.rate_fit(records)
    check(kappa_hat > 0 and r2 > 0.9, f"rate fit kappa_hat={kappa_hat:.2f} r2={r2:.3f}")

    laguerre = pydescm.builtin("laguerre", {"alpha": 3.0})
    mus = laguerre.eigenvalues("de-balanced", 40)[:3]
    check(all(abs(m - i) < 1e-6 for i, m in enumerate(mus)), "Laguerre eigenvalues 0, 1, 2")

    singular = pydescm.builtin("singular")
    rows = singular.study("de-adapted", [8, 9, 10])
    check(rows[0].succ_error is None and rows[1].succ_error is not None, "successive errors")

    merged = singular.compare([4, 5, 6])
    check({r.method for r in merged} == {"se", "de", "de-adapted"}, "compare series")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "study.csv")
        pydescm.write_csv(records, path)
        back = pydescm.read_csv(path)
        check([r.mu for r in back] == [r.mu for r in records], "CSV round trip")

    try:
        pydescm.builtin("bessel", {"n": 0})
    except ValueError as e:
        check("order" in str(e), "bad parameter raises ValueError")
    else:
        raise SystemExit("FAIL: bad parameter accepted")

    cfg = """
name = bessel1
param n = 1
interval = unit
q = (4*n^2 - 1)/(4*x^2)
rho = 1
d = pi/2
beta_l = n
beta_r = 0.5
gamma_l = 1
gamma_r = 1
"""
    custom = pydescm.parse_problem_config(cfg)
    mu1 = custom.eigenvalues("de-balanced", 20)[0]
    check(abs(mu1 - 3.8317059702075123**2) < 1e-9, "parsed problem")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()

"""Exact exponent bookkeeping: the right-hand exponent, the induction replay and
the strong-density saving.

Run: python3 demos/exponent_ledger.py
"""

from fractions import Fraction as F

from densitylab.exponents import (DH, STRONG_DH, converse_budget, induction_verify,
                                  rhs_exponent, strong_dh_application)


def main():
    for eps in (F(1, 100), F(1, 1000), F(1, 10000)):
        r = rhs_exponent(F(3, 10), eps, DH())
        print(f"DH, nu=3/10, eps={eps}: exponent {r.exponent} (+ eps budget {r.eps_budget}),"
              f" max at alpha={r.argmax_alpha}")
    r = rhs_exponent(F(2, 5), F(1, 100), STRONG_DH(F(1, 5)))
    print(f"STRONG_DH(1/5), nu=2/5: exponent {r.exponent} = {float(r.exponent):.4f}")

    tr = induction_verify(F(1, 10), F(1, 20))
    print(f"induction over J={tr.J} levels: passed={tr.passed}, final={tr.final}")

    app = strong_dh_application(F(1, 10), lambda e: F(1, 10), F(1, 2))
    print(f"strong DH: eps0={app.eps0}, eps'={app.eps_prime}, delta1={app.delta1}")
    print("budgets (U1, one-spaced, final):", converse_budget(F(1, 2), F(1, 5)).as_tuple())


if __name__ == "__main__":
    main()

"""Series built from a set of positive integers.

For a set S the series has terms (-1)^n lambda_k / n on (2^k, 2^(k+1)],
where lambda_k = 1 exactly when the running maximum of S grows between 2^k
and 2^(k+1).  Its partial sums are Cauchy with an explicit modulus, and a
bracketing whose blocks shrink below 2^-k survives any rearrangement when S
is pseudobounded.

Run: python3 demos/pseudobounded_series.py
"""

from fractions import Fraction

from permseries import bdn, catalog
from permseries.errors import PseudoboundednessViolation, TailViolation


def main():
    bounded = bdn.finite_sup([1, 2, 3])
    jumps = bdn.custom([1] * 19 + [2] * 50 + [3] * 130 + [4])
    ident = bdn.identity_set()
    for s in (bounded, jumps, ident):
        print(f"{s.name}: lambda_1..10 = {[bdn.lambda_bit(s, k) for k in range(1, 11)]}")
    series = bdn.bdn_series(ident)
    for k in (2, 5, 10):
        spread = bdn.window_spread(series.signed, 2**k + 1, 2 ** (k + 1))
        print(f"  identity set, block k={k}: window spread {float(spread):.2e} < 2^-{k}, "
              f"mass {float(bdn.block_mass(series, k)):.4f}")

    wb = bdn.weak_bracketing(jumps, catalog.two_pos_one_neg())
    for i in range(1, 6):
        k = wb.selected(i)
        print(f"  weak block {i}: k = {k}, sum = {float(wb.block(i)):+.2e}, bound 2^-{k}")
    try:
        bdn.weak_bracketing(ident, catalog.identity()).block(1)
    except PseudoboundednessViolation as e:
        print(f"identity set with a lying modulus: {e}")

    print(f"bounded set, N = 2: bound {bdn.bounded_from_convergence(bounded, 2, 10)}")
    try:
        bdn.bounded_from_convergence(ident, 2, 10)
    except TailViolation as e:
        print(f"identity set: {e}")


if __name__ == "__main__":
    main()

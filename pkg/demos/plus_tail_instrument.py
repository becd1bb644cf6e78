"""Bad intervals in the alternating harmonic series.

With eps = 1/2, a bad interval [n', m] carries plus-mass at least eps, and
pulling its positive terms to the front gives the rearranged series a
window of size at least eps inside it.  Repeating that forever is what
rules out a permutably convergent series that is not absolutely convergent.

Run: python3 demos/plus_tail_instrument.py
"""

from fractions import Fraction

from permseries import catalog
from permseries.instrument import (
    PlusTailPredicate,
    bad_intervals,
    interval_oracle,
    kappa,
    kappa_witnesses,
    lambda_stream,
    rationalize,
    sigma_from_lambda,
    verify_sig1,
)


def main():
    a = catalog.alt_harmonic().terms
    eps = Fraction(1, 2)
    p = PlusTailPredicate(a, eps)
    print("kappa(n) for n = 1..8:", [kappa(p, n, 1000).m for n in range(1, 9)])

    def squares(n):
        return n * n

    lam = lambda_stream(p, squares, kappa_witnesses(p, squares, 10**4))
    print("lambda_1..30 =", "".join(map(str, lam.prefix(30))))
    ivs = bad_intervals(lam, 60)
    sigma = sigma_from_lambda(a, ivs)
    print("sigma starts", sigma.prefix(22))
    for iv in ivs:
        j, k = verify_sig1(a, sigma, iv, eps)
        total = sum((a.term(sigma(i)) for i in range(j + 1, k + 1)), Fraction(0))
        print(f"  bad interval [{iv.lo}, {iv.hi}]: window ({j}, {k}] sums to {total} >= {eps}")

    r = rationalize(interval_oracle(lambda i, iv: iv.pi / i))
    print("rational stand-ins for pi/i:", [str(r.terms.term(i)) for i in range(1, 5)])


if __name__ == "__main__":
    main()

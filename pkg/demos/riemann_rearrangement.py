"""Rearrange the alternating harmonic series to a chosen sum, or to infinity.

Run: python3 demos/riemann_rearrangement.py
"""

from fractions import Fraction

from permseries import catalog
from permseries.rearrange import RearrangementTarget, riemann_permutation


def main():
    terms = catalog.alt_harmonic().terms
    plus, minus, decay = catalog.alt_harmonic_certificates()
    for x in (Fraction(0), Fraction(1, 2), Fraction(-2)):
        sigma = riemann_permutation(terms, RearrangementTarget.finite(x), plus, minus, decay, keep_sums=True)
        print(f"target {x}: first indices {sigma.prefix(12)}")
        for n in (10, 100, 1000, 10000):
            print(f"  after {n:>5} terms the sum is off by {float(abs(sigma.emitted_sum(n) - x)):.2e}")
        print(f"  {len(sigma.switches)} sign switches so far, each within one term of the target")

    plus, minus, _ = catalog.repeated_harmonic_certificates()
    sigma = riemann_permutation(catalog.repeated_harmonic().terms, RearrangementTarget.plus_infinity(), plus, minus)
    while len(sigma.boundaries) < 6:
        sigma.schedule.step()
    print("to +infinity (1, -1, 1/2, -1/2, ...):")
    for pos, level, total in sigma.boundaries:
        print(f"  passed level {level} at position {pos} with partial sum {float(total):.4f}")


if __name__ == "__main__":
    main()

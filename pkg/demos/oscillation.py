"""Two different sums force divergence of the absolute series.

The alternating harmonic series sums to ln 2 and its two-positives-one-
negative rearrangement to 3/2 ln 2.  Interleaving the two orders builds a
permutation whose blocks swing by more than delta/3 forever, and reading
off the blocks gives an index M with 1 + 1/2 + ... + 1/M > C.

Run: python3 demos/oscillation.py
"""

from fractions import Fraction

from permseries import catalog
from permseries.core import bracket_series
from permseries.errors import BudgetExceeded
from permseries.oscillate import build_oscillation, divergence_witness


def main():
    a = catalog.alt_harmonic()
    rearranged, sigma = catalog.alt_harmonic_two_pos_one_neg()
    delta = Fraction(1, 3)
    w = build_oscillation(a, sigma, bracket_series(rearranged, lambda k: k), delta, budget=2**15)
    print(f"s ~ {float(w.s_approx):.6f}, t ~ {float(w.t_approx):.6f}")
    print(f"first block bounds k: {w.block_bounds(8)}")
    for i in range(1, 8):
        b = w.block(i)
        print(f"  block {i}: {b}  (|block| = {float(abs(b)):.4f} > 1/9)")
    print(f"tau starts {w.tau.prefix(16)}")
    for c in (Fraction(1, 2), 1, 2, 5):
        try:
            print(f"C = {c}: M = {divergence_witness(w, a.terms, c)}")
        except BudgetExceeded as e:
            print(f"C = {c}: needs more than the budget ({e})")


if __name__ == "__main__":
    main()

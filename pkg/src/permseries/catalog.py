"""Demo series and permutations with hand-derived certificates.

Moduli (window form, see :class:`~permseries.core.CauchyModulus`):

* alternating harmonic (-1)^(n+1)/n: an alternating series with decreasing
  terms has |a_m + ... + a_m'| <= 1/m, so N(eps) = ceil(1/eps).
* geometric r^n: |window from m| <= |r|^m for r < 0 (alternating, decreasing)
  and <= r^m / (1 - r) for r >= 0.
* alternating harmonic under the two-positives-one-negative order: group g
  holds 1/(4g+1), 1/(4g+3), -1/(2g+2).  Any contiguous piece of a group with
  g >= 1 is at most 1/(2g) in size, a full group sums to
  (8g+5)/((16g^2+16g+3)(2g+2)) <= 1/(4g(g+1)), whose tail from g0+1 is
  1/(4(g0+1)).  A window starting in group g0 is therefore below
  1/(2g0) + 1/(4g0) + 1/(2g0) <= 2/g0, giving N(eps) = 3*ceil(2/eps) + 1.
  The sum is (3/2) ln 2.
* repeated harmonic: block k consists of (1/k, -1/k) repeated k times.
  Partial sums after position m - 1 stay in [0, 1/k] for the block k that
  contains m - 1, so windows from the block ceil(1/eps) on are <= eps.  Each
  block carries positive mass 1, so the series is conditionally convergent
  with linear (hence cheap) divergence of both parts.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import ceil, isqrt

from .core import (
    ZERO,
    CauchyModulus,
    ConvergentSeries,
    Permutation,
    TermStream,
    apply_permutation,
    as_rational,
    smallest_index,
)
from .rearrange import DivergenceCertificate


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def zero_series() -> ConvergentSeries:
    mod = CauchyModulus(lambda eps: 1, "zero")
    return ConvergentSeries(TermStream(lambda n: ZERO, "zero"), mod, mod, "zero")


def alt_harmonic() -> ConvergentSeries:
    terms = TermStream(lambda n: Fraction(1 if n % 2 else -1, n), "alt-harmonic")
    mod = CauchyModulus(lambda eps: _ceil(1 / eps), "alternating 1/m")
    return ConvergentSeries(terms, mod, None, "alt-harmonic")


def _harmonic_half_bound(c: Fraction) -> int:
    # H_(2^m) >= 1 + m/2, so 2^m odd (or even) reciprocals up to 2^(m+1) exceed (1 + m/2)/2.
    m = max(0, (4 * c - 2).__floor__() + 1)
    return 2 ** (m + 1)


def alt_harmonic_certificates():
    """(cert_plus, cert_minus, term_decay) for the alternating harmonic series."""
    plus = DivergenceCertificate(_harmonic_half_bound, "odd reciprocals")
    minus = DivergenceCertificate(_harmonic_half_bound, "even reciprocals")
    return plus, minus, lambda eps: _ceil(1 / as_rational(eps))


def geometric(ratio) -> ConvergentSeries:
    r = as_rational(ratio)
    if not abs(r) < 1:
        raise ValueError(f"geometric ratio must satisfy |r| < 1, got {r}")
    terms = TermStream(lambda n: r**n, f"geometric({r})")
    a = abs(r)

    def window(m: int) -> Fraction:
        return a**m if r < 0 else a**m / (1 - a)

    def abs_tail(m: int) -> Fraction:
        return a**m / (1 - a)

    mod = CauchyModulus(lambda eps: smallest_index(lambda m: window(m) <= eps), f"geometric({r})")
    amod = CauchyModulus(lambda eps: smallest_index(lambda m: abs_tail(m) <= eps), f"|geometric({r})|")
    return ConvergentSeries(terms, mod, amod, f"geometric({r})")


def geometric_sum(ratio) -> Fraction:
    r = as_rational(ratio)
    return r / (1 - r)


def literal(values) -> ConvergentSeries:
    """Finitely many terms followed by zeros; moduli are computed exactly."""
    vals = [as_rational(v) for v in values]
    terms = TermStream(lambda n: vals[n - 1] if n <= len(vals) else ZERO, "literal")

    def tightest(seq: list[Fraction]):
        # least N with every window inside [N, oo) bounded by eps
        sums = [ZERO]
        for v in seq:
            sums.append(sums[-1] + v)
        spreads = []
        lo = hi = sums[-1]
        for s in reversed(sums[:-1]):
            lo, hi = min(lo, s), max(hi, s)
            spreads.append(hi - lo)
        spreads.reverse()  # spreads[m-1] = spread of S_(m-1..len)

        def bound(eps: Fraction) -> int:
            for m, sp in enumerate(spreads, start=1):
                if sp <= eps:
                    return m
            return len(seq) + 1

        return bound

    mod = CauchyModulus(tightest(vals), "literal")
    amod = CauchyModulus(tightest([abs(v) for v in vals]), "|literal|")
    return ConvergentSeries(terms, mod, amod, "literal")


def _rh_block(n: int) -> int:
    k = (1 + isqrt(4 * n - 3)) // 2
    while k * (k - 1) >= n:
        k -= 1
    while k * (k + 1) < n:
        k += 1
    return k


def repeated_harmonic() -> ConvergentSeries:
    def term(n: int) -> Fraction:
        k = _rh_block(n)
        offset = n - 1 - k * (k - 1)
        return Fraction(1 if offset % 2 == 0 else -1, k)

    def bound(eps: Fraction) -> int:
        k = _ceil(1 / eps)
        return k * (k - 1) + 2

    return ConvergentSeries(TermStream(term, "repeated-harmonic"), CauchyModulus(bound, "repeated 1/k"), None,
                            "repeated-harmonic")


def repeated_harmonic_certificates():
    def exceed(c: Fraction) -> int:
        k = c.__floor__() + 1
        return k * (k + 1)

    def decay(eps) -> int:
        k = _ceil(1 / as_rational(eps))
        return k * (k - 1) + 1

    return (DivergenceCertificate(exceed, "repeated-harmonic+"),
            DivergenceCertificate(exceed, "repeated-harmonic-"), decay)


# permutations ----------------------------------------------------------------

def identity() -> Permutation:
    return Permutation(lambda n: n, lambda n: n, "identity")


def transposition(i: int, j: int) -> Permutation:
    if i == j or min(i, j) < 1:
        raise ValueError("transposition needs two distinct positive indices")
    hi = max(i, j)

    def image(n: int) -> int:
        return j if n == i else i if n == j else n

    return Permutation(image, lambda n: max(n, hi) if n >= min(i, j) else n, f"({i} {j})")


def two_pos_one_neg() -> Permutation:
    """1, 3, 2, 5, 7, 4, ...: two odd indices, then one even, in order."""

    def image(n: int) -> int:
        g, r = divmod(n - 1, 3)
        return (4 * g + 1, 4 * g + 3, 2 * g + 2)[r]

    def position(v: int) -> int:
        if v % 2 == 0:
            return 3 * (v // 2)
        i = (v + 1) // 2
        return 3 * ((i - 1) // 2) + (i - 1) % 2 + 1

    def coverage(n: int) -> int:
        best = 0
        for v in (n, n - 1):
            if v >= 1:
                best = max(best, position(v))
        return best

    return Permutation(image, coverage, "two-pos-one-neg")


def pair_swap() -> Permutation:
    """2, 1, 4, 3, ..."""
    return Permutation(lambda n: n + 1 if n % 2 else n - 1, lambda n: n + (n % 2), "pair-swap")


def block_reverse(size: int) -> Permutation:
    if size < 1:
        raise ValueError("block size must be positive")

    def image(n: int) -> int:
        b, r = divmod(n - 1, size)
        return b * size + (size - r)

    return Permutation(image, lambda n: _ceil(Fraction(n, size)) * size, f"reverse{size}")


def growing_block_reverse() -> Permutation:
    """Reverse consecutive blocks of lengths 1, 2, 3, ..."""

    def block(n: int) -> tuple[int, int]:
        # block k covers (k(k-1)/2, k(k+1)/2]
        k = (isqrt(8 * n - 7) + 1) // 2
        while k * (k + 1) // 2 < n:
            k += 1
        while k * (k - 1) // 2 >= n:
            k -= 1
        return k * (k - 1) // 2 + 1, k * (k + 1) // 2

    def image(n: int) -> int:
        lo, hi = block(n)
        return lo + hi - n

    return Permutation(image, lambda n: block(n)[1], "growing-reverse")


def block_shuffle(seed: int, size: int) -> Permutation:
    """Pseudorandom permutation shuffling each block of ``size`` consecutive integers."""
    if size < 1:
        raise ValueError("block size must be positive")
    cache: dict[int, list[int]] = {}

    def image(n: int) -> int:
        b, r = divmod(n - 1, size)
        if b not in cache:
            vals = list(range(b * size + 1, (b + 1) * size + 1))
            random.Random(f"{seed}:{b}").shuffle(vals)
            cache[b] = vals
        return cache[b][r]

    return Permutation(image, lambda n: _ceil(Fraction(n, size)) * size, f"shuffle({seed},{size})")


def explicit(prefix) -> Permutation:
    """A finite permutation of 1..L given as a list, extended by the identity."""
    vals = [int(v) for v in prefix]
    if sorted(vals) != list(range(1, len(vals) + 1)):
        raise ValueError("explicit prefix must be a permutation of 1..len(prefix)")
    length = len(vals)
    return Permutation(lambda n: vals[n - 1] if n <= length else n,
                       lambda n: max(n, length) if n <= length else n, "explicit")


def alt_harmonic_two_pos_one_neg() -> tuple[ConvergentSeries, Permutation]:
    """The alternating harmonic series in the 1, 3, 2, 5, 7, 4, ... order, with modulus."""
    sigma = two_pos_one_neg()
    base = alt_harmonic()
    mod = CauchyModulus(lambda eps: 3 * _ceil(2 / eps) + 1, "grouped two-pos-one-neg")
    return ConvergentSeries(apply_permutation(base.terms, sigma), mod, None, "alt-harmonic(2+1-)"), sigma

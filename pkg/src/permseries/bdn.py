"""Series attached to a pseudobounded set, and the brackets that tame them.

From an enumeration s_1, s_2, ... of a set of positive integers we take the
running maximum, read off one bit per dyadic range,

    lambda_k = 1  iff  s_(2^(k+1)) > s_(2^k),

and put a_n = lambda_k / n for 2^k < n <= 2^(k+1) (a_1 = a_2 = 0).  The
alternating series sum (-1)^n a_n converges with the explicit modulus
N(eps) = 2^k + 1, where k >= 1 is least with 2^-(k-1) <= eps.  For any
permutation, :func:`weak_bracketing` uses the pseudoboundedness oracle to
find brackets over all-zero stretches of lambda, so the rearranged series
has a convergent bracketing.  Whether sum a_n itself converges is a
different matter: if it does, the set is bounded
(:func:`bounded_from_convergence`).

Threading: single-threaded; pb_modulus oracles must be pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import (
    ZERO,
    _Acc,
    _fraction,
    Bracketing,
    CauchyModulus,
    ConvergentSeries,
    Permutation,
    TermStream,
    bracket_series,
    smallest_index,
)
from .errors import PseudoboundednessViolation, TailViolation

Sequence = Callable[[int], int]


class PseudoboundedSet:
    """An enumerated set of positive integers with a pseudoboundedness oracle.

    ``pb_modulus(seq)`` must return N with seq(n) < n for all n >= N,
    whenever ``seq`` takes values in the set.  The hints ``stable_after``
    (the enumeration is constant from that index on) and ``nondecreasing``
    let the running maximum skip long scans.
    """

    def __init__(self, enumerate: Sequence, pb_modulus: Callable[[Sequence], int], name: str = "set",
                 stable_after: int | None = None, nondecreasing: bool = False):
        self._enum = enumerate
        self.pb_modulus = pb_modulus
        self.name = name
        self.stable_after = stable_after
        self.nondecreasing = nondecreasing
        self._cache: list[int] = []
        first = self(1)
        if first < 1:
            raise ValueError(f"set elements must be positive integers, got s_1 = {first}")

    def __repr__(self) -> str:
        return f"PseudoboundedSet({self.name!r})"

    def __call__(self, n: int) -> int:
        if n < 1:
            raise IndexError(f"enumeration index must be >= 1, got {n}")
        if self.stable_after is not None and n > self.stable_after:
            n = self.stable_after
        cache = self._cache
        while len(cache) < n:
            v = int(self._enum(len(cache) + 1))
            if v < 1:
                raise ValueError(f"set elements must be positive integers, got {v}")
            cache.append(v)
        return cache[n - 1]

    enumerate = __call__

    def prefix(self, n: int) -> list[int]:
        return [self(i) for i in range(1, n + 1)]


def _from_prefix(values, name: str, pb_modulus) -> PseudoboundedSet:
    vals = [int(v) for v in values]
    if not vals:
        raise ValueError("a set needs at least one element")
    if min(vals) < 1:
        raise ValueError("set elements must be positive integers")
    last = len(vals)
    return PseudoboundedSet(lambda n: vals[min(n, last) - 1], pb_modulus, name, stable_after=last,
                            nondecreasing=all(x <= y for x, y in zip(vals, vals[1:])))


def finite_sup(values) -> PseudoboundedSet:
    """Enumerate ``values`` and then repeat the last one; bounded by max(values).

    The modulus is honest: any sequence in the set stays below n once
    n > max(values).
    """
    vals = [int(v) for v in values]
    bound = max(vals) + 1 if vals else 1
    return _from_prefix(vals, f"finite-sup({','.join(map(str, vals))})", lambda seq: bound)


def custom(enum_prefix, tail: str = "constant") -> PseudoboundedSet:
    """A prefix followed by a constant tail (the last prefix value)."""
    if tail != "constant":
        raise ValueError(f"unsupported tail rule {tail!r}")
    vals = [int(v) for v in enum_prefix]
    bound = max(vals) + 1 if vals else 1
    return _from_prefix(vals, "custom", lambda seq: bound)


def identity_set(claimed: int = 1) -> PseudoboundedSet:
    """All positive integers, s_n = n.  Not pseudobounded, so its modulus lies."""
    return PseudoboundedSet(lambda n: n, lambda seq: claimed, "identity", nondecreasing=True)


class _Closure(PseudoboundedSet):
    def __init__(self, base: PseudoboundedSet):
        self.base = base
        self._maxes: list[int] = []
        super().__init__(self._running_max, base.pb_modulus, f"closure({base.name})",
                         stable_after=base.stable_after, nondecreasing=True)

    def _running_max(self, n: int) -> int:
        if self.base.nondecreasing:
            return self.base(n)
        m = self._maxes
        while len(m) < n:
            v = self.base(len(m) + 1)
            m.append(max(v, m[-1]) if m else v)
        return m[n - 1]


def monotone_closure(s: PseudoboundedSet) -> PseudoboundedSet:
    """s'_n = max(s_1, ..., s_n); a closed set is returned unchanged."""
    if isinstance(s, _Closure):
        return s
    return _Closure(s)


def lambda_bit(s: PseudoboundedSet, k: int) -> int:
    if k < 1:
        raise ValueError(f"lambda index must be >= 1, got {k}")
    c = monotone_closure(s)
    return 1 if c(2 ** (k + 1)) > c(2**k) else 0


def _dyadic_block(n: int) -> int:
    # k with 2^k < n <= 2^(k+1)
    return (n - 1).bit_length() - 1


def bdn_term(s: PseudoboundedSet, n: int) -> Fraction:
    """(-1)^n lambda_k / n for 2^k < n <= 2^(k+1); 0 for n <= 2."""
    if n < 1:
        raise IndexError(f"term index must be >= 1, got {n}")
    if n <= 2:
        return ZERO
    if not lambda_bit(s, _dyadic_block(n)):
        return ZERO
    return Fraction(1 if n % 2 == 0 else -1, n)


def bdn_cauchy_bound(k: int) -> Fraction:
    """Bound 2^-(k-1) on any window of the signed series starting past 2^k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return Fraction(1, 2 ** (k - 1))


@dataclass
class BdnSeries:
    set: PseudoboundedSet
    magnitudes: TermStream
    signed: TermStream
    modulus: CauchyModulus

    def lam(self, k: int) -> int:
        return lambda_bit(self.set, k)

    def as_convergent(self) -> ConvergentSeries:
        return ConvergentSeries(self.signed, self.modulus, None, f"bdn({self.set.name})")


def _bdn_modulus() -> CauchyModulus:
    def bound(eps: Fraction) -> int:
        k = smallest_index(lambda k: bdn_cauchy_bound(k) <= eps, start=1)
        return 2**k + 1

    return CauchyModulus(bound, "dyadic 2^-(k-1)")


def bdn_series(s: PseudoboundedSet) -> BdnSeries:
    c = monotone_closure(s)
    signed = TermStream(lambda n: bdn_term(c, n), f"bdn({s.name})")
    mags = signed.map(abs, f"|bdn({s.name})|")
    return BdnSeries(c, mags, signed, _bdn_modulus())


class _WeakState:
    def __init__(self, series: BdnSeries, sigma: Permutation):
        self.series = series
        self.set = series.set
        self.sigma = sigma
        self.js = [2]
        self.ns: list[int] = []
        self.selected: list[int] = []
        self.moduli: list[int] = []

    def _extend_j(self, k: int):
        # realize j_1..j_k and n_1..n_(k-1)
        sigma = self.sigma
        while len(self.js) < k:
            jk = self.js[-1]
            n = max(sigma.coverage(2**jk), 2**jk + 1)
            top = max(sigma.prefix(n))
            j = jk + 1
            while 2**j <= n or 2**j < top:
                j += 1
            self.ns.append(n)
            self.js.append(j)

    def j(self, k: int) -> int:
        self._extend_j(k)
        return self.js[k - 1]

    def n(self, k: int) -> int:
        self._extend_j(k + 1)
        return self.ns[k - 1]

    def _zero_window(self, k: int) -> bool:
        return all(lambda_bit(self.set, i) == 0 for i in range(self.j(k), self.j(k + 1)))

    def select(self, i: int) -> int:
        while len(self.selected) < i:
            prev = self.selected[-1] if self.selected else 0

            def seq(k: int, prev=prev) -> int:
                return self.set(2 ** self.j(prev + k + 1))

            big_k = int(self.set.pb_modulus(seq))
            if big_k < 1:
                raise PseudoboundednessViolation(f"pb_modulus returned {big_k}", value=big_k)
            for m in (big_k, big_k + 1):
                if not seq(m) < m:
                    raise PseudoboundednessViolation(
                        f"pb_modulus claims value(n) < n from {big_k}, but value({m}) = {seq(m)}",
                        value=(m, seq(m)),
                    )
            for kappa in range(1, big_k + 1):
                if self._zero_window(prev + kappa):
                    self.selected.append(prev + kappa)
                    self.moduli.append(big_k)
                    break
            else:
                raise PseudoboundednessViolation(
                    f"no all-zero lambda window among k = {prev + 1}..{prev + big_k} (modulus {big_k})",
                    value=big_k,
                )
        return self.selected[i - 1]


@dataclass
class WeakBracketing:
    sigma: Permutation
    bracketing: Bracketing
    _state: _WeakState

    def j(self, k: int) -> int:
        return self._state.j(k)

    def n(self, k: int) -> int:
        return self._state.n(k)

    def selected(self, i: int) -> int:
        return self._state.select(i)

    @property
    def blocks(self) -> TermStream:
        return self.bracketing.blocks

    def block(self, i: int) -> Fraction:
        """Sum over positions n_(k_i) < n <= n_(k_(i+1)); below 2^-k_i in size."""
        return self.bracketing.blocks.term(i + 1)

    def check_block(self, i: int) -> Fraction:
        b = self.block(i)
        bound = Fraction(1, 2 ** self.selected(i))
        if not abs(b) < bound:
            raise PseudoboundednessViolation(f"block {i} = {b} is not below {bound}", value=b)
        return b


def weak_bracketing(s: PseudoboundedSet, sigma: Permutation) -> WeakBracketing:
    """A convergent bracketing of the sigma-rearranged signed series.

    Realization is lazy.  Bracket boundaries sit after positions
    n_(k_1), n_(k_2), ...; the k_i are picked by the pseudoboundedness
    oracle so that lambda vanishes on [j_(k_i), j_(k_i + 1)).
    """
    series = bdn_series(s)
    state = _WeakState(series, sigma)

    def f(i: int) -> int:
        return 1 if i == 1 else state.n(state.select(i - 1)) + 1

    rearranged = TermStream(lambda n: series.signed.term(sigma(n)), f"{series.signed.name}o{sigma.name}")

    # block i + 1 is below 2^-k_i <= 2^-i, so windows from block m are below 2^-(m-2)
    def bound(eps: Fraction) -> int:
        return smallest_index(lambda m: Fraction(1, 2 ** (m - 2)) <= eps, start=2)

    br = bracket_series(rearranged, f, CauchyModulus(bound, "comparison with 2^-k_i"))
    return WeakBracketing(sigma, br, state)


def window_spread(stream: TermStream, lo: int, hi: int) -> Fraction:
    """Largest |a_m1 + ... + a_m2| over lo <= m1 <= m2 <= hi, exactly.

    Equals max - min of the partial sums S_(lo-1), ..., S_hi.
    """
    best_lo = best_hi = None
    for n, total in stream.iter_partial_sums(lo - 1):
        if best_lo is None or total < best_lo:
            best_lo = total
        if best_hi is None or total > best_hi:
            best_hi = total
        if n >= hi:
            break
    return _fraction(best_hi - best_lo)


def block_mass(series: BdnSeries, k: int) -> Fraction:
    """a_(2^k+1) + ... + a_(2^(k+1))."""
    total = _Acc(0)
    for n in range(2**k + 1, 2 ** (k + 1) + 1):
        total += series.magnitudes.term(n)
    return _fraction(total)


def bounded_from_convergence(s: PseudoboundedSet, n: int, check_range: int) -> int:
    """The bound s_(2^N), after checking lambda_k = 0 for N <= k <= check_range.

    Convergence of sum a_n is a hypothesis; the finite range stands in for
    it.  A lambda_k = 1 found in the range raises :class:`TailViolation`.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    c = monotone_closure(s)
    for k in range(n, check_range + 1):
        if lambda_bit(c, k):
            raise TailViolation(
                f"lambda_{k} = 1: s_{2 ** (k + 1)} = {c(2 ** (k + 1))} > s_{2 ** k} = {c(2 ** k)}",
                value=k,
            )
    bound = c(2**n)
    top = 2 ** (max(n, check_range) + 1)
    if c(top) > bound:
        raise TailViolation(f"s_{top} = {c(top)} exceeds s_{2 ** n} = {bound}", value=c(top))
    return bound

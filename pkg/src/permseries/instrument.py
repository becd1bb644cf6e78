"""Finite pieces of the argument that permutable convergence forces absolute convergence.

Fix rational terms a_i and eps > 0.  phi(m, n) = 0 exactly when m > n and the
plus-mass a_(n+1)^+ + ... + a_m^+ reaches eps; S is the set of n with such
an m, and kappa(n) is the least one.  Given an increasing sequence in S, a
0/1 sequence lambda marks runs [n', kappa(n')] ("bad intervals") that each
carry plus-mass >= eps; the permutation sigma pulls the positive terms of
every run to its front, so the rearranged series has a window of size
>= eps inside each run.

Everything is exact; searches that may not terminate take a fuel bound and
report ``Unknown`` instead.

Threading: single-threaded; oracles must be pure.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from .core import ZERO, _Acc, _fraction, Permutation, TermStream, as_rational
from .errors import MembershipViolation, NotFound, OverlapError


class PlusTailPredicate:
    """phi for a rational series: plus-tail sums compared with eps."""

    def __init__(self, series: TermStream, eps):
        eps = as_rational(eps)
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        self.series = series
        self.eps = eps
        self._eps = _Acc(eps)
        self.plus = series.map(lambda a: a if a > 0 else ZERO, f"{series.name}+")

    @classmethod
    def for_minus(cls, series: TermStream, eps) -> "PlusTailPredicate":
        """The same predicate on a^- = (-a)^+, for the minus half of the argument."""
        return cls(series.map(lambda a: -a, f"-{series.name}"), eps)

    def plus_mass(self, n: int, m: int) -> Fraction:
        """a_(n+1)^+ + ... + a_m^+ (0 when m <= n)."""
        if m <= n:
            return ZERO
        return self.plus.window_sum(n + 1, m)

    def _reaches(self, n: int, m: int) -> bool:
        return self.plus._sum(m) - self.plus._sum(n) >= self._eps

    def phi(self, m: int, n: int) -> int:
        if m <= n:
            return 1
        return 0 if self._reaches(n, m) else 1


def phi(p: PlusTailPredicate, m: int, n: int) -> int:
    return p.phi(m, n)


@dataclass(frozen=True)
class Member:
    m: int


@dataclass(frozen=True)
class Unknown:
    searched_up_to: int


SMembership = Union[Member, Unknown]


def kappa(p: PlusTailPredicate, n: int, fuel: int) -> SMembership:
    """Least m in (n, n + fuel] with phi(m, n) = 0, or ``Unknown(n + fuel)``.

    Plus-prefix sums are nondecreasing in m, so a galloping search up to
    n + fuel brackets the least m and bisection pins it down.
    """
    if fuel < 1:
        raise ValueError(f"fuel must be >= 1, got {fuel}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cap = n + fuel
    lo, step = n, 1  # phi(lo, n) = 1
    while True:
        hi = min(n + step, cap)
        if p._reaches(n, hi):
            break
        if hi == cap:
            return Unknown(cap)
        lo, step = hi, 2 * step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if p._reaches(n, mid):
            hi = mid
        else:
            lo = mid
    if p.phi(hi, n) != 0 or (hi - 1 > n and p.phi(hi - 1, n) != 1):
        raise MembershipViolation(f"kappa({n}) = {hi} failed its minimality check", value=hi)
    return Member(hi)


def normalization_report(p: PlusTailPredicate) -> dict:
    """Whether the input meets the convenient normalization phi(2, 1) = 0."""
    return {"phi(2,1)": p.phi(2, 1), "plus_mass(1,2)": p.plus_mass(1, 2)}


def kappa_witnesses(p: PlusTailPredicate, s_seq: Callable[[int], int], fuel: int) -> Callable[[int], int]:
    """Membership witnesses n -> kappa(s_n), failing if the fuel runs out."""
    cache: dict[int, int] = {}

    def witness(n: int) -> int:
        v = s_seq(n)
        if v not in cache:
            r = kappa(p, v, fuel)
            if not isinstance(r, Member):
                raise MembershipViolation(f"no witness for s_{n} = {v} within fuel {fuel}", value=v)
            cache[v] = r.m
        return cache[v]

    return witness


@dataclass
class BadInterval:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 1 or self.hi < self.lo:
            raise ValueError(f"bad interval needs 1 <= lo <= hi, got [{self.lo}, {self.hi}]")

    def __iter__(self):
        return iter((self.lo, self.hi))


class LambdaStream:
    """The 0/1 sequence lambda built from an increasing sequence in S.

    ``witnesses(n)`` must give m with phi(m, s_n) = 0; each one is checked
    when used.  ``run_witness`` records, for every run start n', the index
    certifying n' in S.
    """

    def __init__(self, p: PlusTailPredicate, s_seq: Callable[[int], int], witnesses: Callable[[int], int]):
        self.p = p
        self.s = s_seq
        self.witnesses = witnesses
        if s_seq(1) != 1:
            raise ValueError(f"the sequence in S must start with s_1 = 1, got {s_seq(1)}")
        self.bits = [0]
        self.run_start: int | None = None
        self.run_witness: dict[int, int] = {}
        self.closed_runs: list[BadInterval] = []
        self._closing: dict[int, int] = {}

    def _member_witness(self, n: int) -> int:
        v = self.s(n)
        m = int(self.witnesses(n))
        if self.p.phi(m, v) != 0:
            raise MembershipViolation(f"witness {m} for s_{n} = {v} fails: phi({m}, {v}) = 1", value=(n, v, m))
        return m

    def _next(self):
        n = len(self.bits)
        if self.bits[-1] == 0:
            v = self.s(n + 1)
            if v <= n + 1:
                self.bits.append(0)
                return
            # s_(n+1) > n + 1 lies in S; its witness also covers n + 1
            m = self._member_witness(n + 1)
            if self.p.phi(m, n + 1) != 0:
                raise MembershipViolation(f"witness {m} does not carry over to {n + 1}", value=(n + 1, m))
            self.run_start = n + 1
            self.run_witness[n + 1] = m
            self.bits.append(1)
            return
        start = self.run_start
        if start not in self._closing:
            k = kappa(self.p, start, self.run_witness[start] - start)
            if not isinstance(k, Member):  # pragma: no cover - the witness bounds the search
                raise MembershipViolation(f"kappa({start}) not found below its witness", value=start)
            self._closing[start] = k.m
        if self._closing[start] == n:
            self.closed_runs.append(BadInterval(start, n))
            self.run_start = None
            self.bits.append(0)
        else:
            self.bits.append(1)

    def bit(self, n: int) -> int:
        if n < 1:
            raise IndexError(f"lambda index must be >= 1, got {n}")
        while len(self.bits) < n:
            self._next()
        return self.bits[n - 1]

    __call__ = bit

    def prefix(self, n: int) -> list[int]:
        self.bit(n)
        return self.bits[:n]


def lambda_stream(p: PlusTailPredicate, s_seq: Callable[[int], int],
                  witnesses: Callable[[int], int]) -> LambdaStream:
    return LambdaStream(p, s_seq, witnesses)


def _bit_reader(lam) -> Callable[[int], int]:
    if isinstance(lam, LambdaStream):
        return lam.bit
    if callable(lam):
        return lam
    bits = list(lam)
    return lambda n: bits[n - 1] if n <= len(bits) else 0


def bad_intervals(lam, upto: int) -> list[BadInterval]:
    """Maximal 1-runs [lo, hi] with hi + 1 <= upto (the closing 0 is seen)."""
    bit = _bit_reader(lam)
    out = []
    lo = None
    for n in range(1, upto + 1):
        b = bit(n)
        if b and lo is None:
            lo = n
        elif not b and lo is not None:
            out.append(BadInterval(lo, n - 1))
            lo = None
    return out


class SigmaFromLambda(Permutation):
    def __init__(self, a: TermStream, intervals: Sequence[BadInterval]):
        ivs = sorted((BadInterval(*iv) for iv in intervals), key=lambda iv: iv.lo)
        for x, y in zip(ivs, ivs[1:]):
            if y.lo <= x.hi:
                raise OverlapError(f"intervals [{x.lo}, {x.hi}] and [{y.lo}, {y.hi}] overlap")
        self.a = a
        self.intervals = ivs
        self._los = [iv.lo for iv in ivs]
        self._maps: dict[int, list[int]] = {}
        super().__init__(self._image, self._cover, "sigma(lambda)")

    def _containing(self, n: int) -> BadInterval | None:
        i = bisect.bisect_right(self._los, n) - 1
        if i >= 0 and self.intervals[i].hi >= n:
            return self.intervals[i]
        return None

    def positives(self, iv: BadInterval) -> list[int]:
        return [i for i in range(iv.lo, iv.hi + 1) if self.a.term(i) > 0]

    def _image(self, n: int) -> int:
        iv = self._containing(n)
        if iv is None:
            return n
        if iv.lo not in self._maps:
            pos = self.positives(iv)
            rest = [i for i in range(iv.lo, iv.hi + 1) if not self.a.term(i) > 0]
            self._maps[iv.lo] = pos + rest
        return self._maps[iv.lo][n - iv.lo]

    def _cover(self, n: int) -> int:
        iv = self._containing(n)
        return n if iv is None else iv.hi


def sigma_from_lambda(a: TermStream, intervals) -> SigmaFromLambda:
    """Identity off the intervals; inside each, positive terms first, both parts in index order."""
    return SigmaFromLambda(a, intervals)


def verify_sig1(a: TermStream, sigma: Permutation, iv: BadInterval, eps) -> tuple[int, int]:
    """(j, k) with a_sigma(j+1) + ... + a_sigma(k) >= eps inside the interval.

    j = lo - 1 and k = lo + K - 1, K the number of positive terms in the
    interval: the window covers exactly the positives pulled to the front.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    lo, hi = iv
    count = sum(1 for i in range(lo, hi + 1) if a.term(i) > 0)
    j, k = lo - 1, lo + count - 1
    total = sum((a.term(sigma(i)) for i in range(j + 1, k + 1)), ZERO)
    if not total >= eps:
        raise NotFound(f"window ({j}, {k}] of the rearranged series sums to {total} < {eps}", value=total)
    return j, k


@dataclass
class Rationalized:
    terms: TermStream
    _queries: dict = field(default_factory=dict, repr=False)

    def shift_bounds(self, i: int) -> tuple[Fraction, Fraction]:
        """Exact enclosure [lo, hi] of b_i = c_i - a_i; always 0 < lo and hi < 2^-i."""
        c = self.terms.term(i)
        r, err = self._queries[i]
        return c - r - err, c - r + err


def rationalize(oracle: Callable[[int, Fraction], object]) -> Rationalized:
    """Rational terms c_i = a_i + b_i with 0 < b_i < 2^-i.

    ``oracle(i, err)`` returns a rational within err of the real a_i.  With
    err = 2^-(i+2), c_i is the least multiple of 2^-(i+2) strictly above
    r + err, so a_i < c_i <= a_i + 3 * 2^-(i+2).
    """
    queries: dict[int, tuple[Fraction, Fraction]] = {}

    def term(i: int) -> Fraction:
        scale = 2 ** (i + 2)
        err = Fraction(1, scale)
        r = as_rational(oracle(i, err))
        queries[i] = (r, err)
        m = ((r + err) * scale).__floor__() + 1
        return Fraction(m, scale)

    return Rationalized(TermStream(term, "rationalized"), queries)


def rational_oracle(values: Callable[[int], object]) -> Callable[[int, Fraction], Fraction]:
    """Oracle for terms that are already rational (answers are exact)."""
    return lambda i, err: as_rational(values(i))


def interval_oracle(expr: Callable[[int, object], object]) -> Callable[[int, Fraction], Fraction]:
    """Oracle from mpmath interval arithmetic.

    ``expr(i, iv)`` builds the i-th term with the ``mpmath.iv`` context; the
    precision is raised until the enclosure is narrower than 2 * err, and
    its midpoint is returned exactly.
    """
    from mpmath import iv
    from mpmath.libmp import to_rational

    def to_fraction(raw) -> Fraction:
        num, den = to_rational(raw)
        return Fraction(int(num), int(den))

    def query(i: int, err: Fraction) -> Fraction:
        prec = max(53, err.denominator.bit_length() + 20)
        while True:
            saved = iv.prec
            iv.prec = prec
            try:
                val = expr(i, iv)
                lo, hi = (to_fraction(x) for x in iv.convert(val)._mpi_)
            finally:
                iv.prec = saved
            if hi - lo <= 2 * err:
                return (lo + hi) / 2
            prec *= 2

    return query


@dataclass
class TailCheck:
    passed: bool
    total: Fraction

    def __bool__(self) -> bool:
        return self.passed


def tail_bound_check(p: PlusTailPredicate, big_n: int, n: int, m: int) -> TailCheck:
    """Does a_(n+1)^+ + ... + a_m^+ <= eps hold?  A failure carries the exact sum."""
    if not m > n >= big_n:
        raise ValueError(f"need m > n >= N, got m = {m}, n = {n}, N = {big_n}")
    total = _fraction(p.plus._sum(m) - p.plus._sum(n))
    return TailCheck(total <= p.eps, total)

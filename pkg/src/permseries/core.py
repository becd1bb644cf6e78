"""Exact rationals, term streams, moduli, permutations and bracketings.

Everything here is exact: rationals are :class:`fractions.Fraction` and no
operation ever rounds.  Streams are lazy and memoize what they evaluate.

Threading: the library is single-threaded.  Memo tables are plain lists and
dicts without locks; share a stream between threads only behind your own lock.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .errors import (
    BracketingError,
    CertificateViolation,
    InjectivityError,
    ModulusViolation,
)

Rational = Fraction

try:  # exact accumulator for long sums; gmpy2 is several times faster on huge denominators
    from gmpy2 import mpq as _Acc
except ImportError:  # pragma: no cover
    _Acc = Fraction


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator))

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def as_rational(x) -> Fraction:
    """Coerce ints, strings ``"p/q"`` and fractions to a :class:`Fraction`.

    Floats are refused; they would smuggle a rounded value into exact code.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q) -> str:
    """``"p/q"`` in lowest terms, or ``"p"`` for integers."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


ZERO = Fraction(0)

_CHECKPOINT = 512


class TermStream:
    """A total sequence ``n -> a_n`` (n >= 1) of exact rationals.

    Terms are memoized in evaluation order.  Partial sums are cached at
    every ``_CHECKPOINT``-th index plus the most recent query, which keeps
    memory bounded when denominators grow like ``lcm(1..n)``.
    """

    def __init__(self, term: Callable[[int], object], name: str = "stream"):
        self._fn = term
        self.name = name
        self._terms: list[Fraction] = []
        self._checkpoints = [_Acc(0)]
        self._last = (0, _Acc(0))

    def __repr__(self) -> str:
        return f"TermStream({self.name!r})"

    def term(self, n: int) -> Fraction:
        if n < 1:
            raise IndexError(f"term index must be >= 1, got {n}")
        terms = self._terms
        while len(terms) < n:
            terms.append(as_rational(self._fn(len(terms) + 1)))
        return terms[n - 1]

    __call__ = term

    def prefix(self, n: int) -> list[Fraction]:
        if n > 0:
            self.term(n)
        return self._terms[:n]

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"partial sum index must be >= 0, got {n}")
        return _fraction(self._sum(n))

    def _sum(self, n: int):
        cps = self._checkpoints
        base = min(n // _CHECKPOINT, len(cps) - 1) * _CHECKPOINT
        s = cps[base // _CHECKPOINT]
        last_n, last_s = self._last
        if base <= last_n <= n:
            base, s = last_n, last_s
        for m in range(base + 1, n + 1):
            s += self.term(m)
            if m % _CHECKPOINT == 0 and m // _CHECKPOINT == len(cps):
                cps.append(s)
        self._last = (n, s)
        return s

    def iter_partial_sums(self, start: int = 0) -> Iterator[tuple[int, Fraction]]:
        """Yield ``(n, S_n)`` for n = start, start+1, ... without caching each one.

        Sums come from the internal accumulator (``gmpy2.mpq`` when available);
        they compare and combine exactly with :class:`Fraction`.
        """
        n, s = start, self._sum(start)
        cps = self._checkpoints
        while True:
            yield n, s
            n += 1
            s += self.term(n)
            if n % _CHECKPOINT == 0 and n // _CHECKPOINT == len(cps):
                cps.append(s)

    def window_sum(self, lo: int, hi: int) -> Fraction:
        """Sum of a_lo .. a_hi inclusive (empty when hi < lo)."""
        if hi < lo:
            return ZERO
        if hi - lo < 64:
            return sum((self.term(i) for i in range(lo, hi + 1)), ZERO)
        return _fraction(self._sum(hi) - self._sum(lo - 1))

    def map(self, fn: Callable[[Fraction], object], name: str | None = None) -> "TermStream":
        return TermStream(lambda n: fn(self.term(n)), name or f"map({self.name})")


def zero_stream() -> TermStream:
    return TermStream(lambda n: ZERO, "zero")


class CauchyModulus:
    """Window modulus: for m' >= m >= N(eps), |a_m + ... + a_m'| <= eps.

    The certificate is trusted; :func:`verify_modulus` checks it on a finite
    range.
    """

    def __init__(self, bound: Callable[[Fraction], int], name: str = "modulus"):
        self._bound = bound
        self.name = name

    def __call__(self, eps) -> int:
        eps = as_rational(eps)
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        return max(1, int(self._bound(eps)))

    def __repr__(self) -> str:
        return f"CauchyModulus({self.name!r})"


def smallest_index(pred: Callable[[int], bool], start: int = 1, limit: int = 10**7) -> int:
    """Least n >= start with ``pred(n)``; used to invert monotone bounds."""
    n = start
    while not pred(n):
        n += 1
        if n > limit:
            raise ValueError("search limit exceeded")
    return n


def verify_modulus(stream: TermStream, modulus: CauchyModulus, eps, upto: int) -> Fraction:
    """Check every window inside [N(eps), upto] exactly.

    The largest window magnitude over all m <= m' in that range equals
    max(S) - min(S) over the partial sums S_{N-1}, ..., S_upto, so one scan
    settles all windows.  Returns that spread; raises if it exceeds ``eps``.
    """
    eps = as_rational(eps)
    start = modulus(eps)
    if upto < start:
        return ZERO
    lo = hi = None
    for n, s in stream.iter_partial_sums(start - 1):
        if lo is None or s < lo:
            lo = s
        if hi is None or s > hi:
            hi = s
        if n >= upto:
            break
    spread = _fraction(hi - lo)
    if spread > eps:
        raise ModulusViolation(
            f"{modulus.name}: window spread {spread} > eps {eps} within [{start}, {upto}]",
            value=spread,
        )
    return spread


@dataclass
class ConvergentSeries:
    """A term stream with a window modulus.

    ``absolute_modulus``, when present, certifies the same window bound for
    the absolute values, i.e. sum_{n >= N} |a_n| <= eps.
    """

    terms: TermStream
    modulus: CauchyModulus
    absolute_modulus: CauchyModulus | None = None
    name: str = "series"


class Permutation:
    """A bijection of the positive integers given by its image and a coverage map.

    ``coverage(N) = M`` certifies {1..N} is contained in {sigma(1)..sigma(M)}.
    Images are memoized; a repeated value raises :class:`InjectivityError` the
    moment it is produced.
    """

    def __init__(self, image: Callable[[int], int], coverage: Callable[[int], int], name: str = "permutation"):
        if coverage is None:
            raise CertificateViolation(f"permutation {name!r} has no coverage certificate")
        self._image = image
        self._coverage = coverage
        self.name = name
        self._values: list[int] = []
        self._pos: dict[int, int] = {}

    def __repr__(self) -> str:
        return f"Permutation({self.name!r})"

    def __call__(self, n: int) -> int:
        if n < 1:
            raise IndexError(f"permutation index must be >= 1, got {n}")
        vals = self._values
        while len(vals) < n:
            k = len(vals) + 1
            v = int(self._image(k))
            if v < 1:
                raise CertificateViolation(f"{self.name}: image {v} at {k} is not positive", value=v)
            if v in self._pos:
                raise InjectivityError(
                    f"{self.name}: sigma({self._pos[v]}) = sigma({k}) = {v}", value=(self._pos[v], k, v)
                )
            self._pos[v] = k
            vals.append(v)
        return vals[n - 1]

    def prefix(self, n: int) -> list[int]:
        if n > 0:
            self(n)
        return self._values[:n]

    def coverage(self, n: int) -> int:
        if n <= 0:
            return 0
        return int(self._coverage(n))

    def position(self, value: int) -> int:
        """The n with sigma(n) == value, found within coverage(value)."""
        if value in self._pos:
            return self._pos[value]
        m = self.coverage(value)
        self.prefix(m)
        if value not in self._pos:
            raise CertificateViolation(
                f"{self.name}: value {value} missing from the first {m} images", value=value
            )
        return self._pos[value]

    def evaluated(self) -> int:
        return len(self._values)


class _IndexMap:
    """Memoized strictly increasing map with f(1) = 1, checked as it is read."""

    def __init__(self, f: Callable[[int], int]):
        self._f = f
        self._vals: list[int] = []
        first = int(f(1))
        if first != 1:
            raise BracketingError(f"bracketing map must start at f(1) = 1, got {first}")
        self._vals.append(first)

    def __call__(self, k: int) -> int:
        if k < 1:
            raise IndexError(k)
        vals = self._vals
        while len(vals) < k:
            j = len(vals) + 1
            v = int(self._f(j))
            if v <= vals[-1]:
                raise BracketingError(f"bracketing map not increasing: f({j - 1}) = {vals[-1]}, f({j}) = {v}")
            vals.append(v)
        return vals[k - 1]


@dataclass
class Bracketing:
    series: TermStream
    f: Callable[[int], int]
    blocks: TermStream
    modulus: CauchyModulus | None = None

    def block_sum_through(self, k: int) -> Fraction:
        return self.blocks.partial_sum(k)


def partial_sum(s: TermStream, n: int) -> Fraction:
    """Exact sum of the first ``n`` terms; 0 for n = 0."""
    return s.partial_sum(n)


def bracket_series(s, f: Callable[[int], int], modulus: CauchyModulus | None = None) -> Bracketing:
    """Group ``s`` by the index map ``f``: b_k = a_f(k) + ... + a_(f(k+1)-1).

    If ``s`` is a :class:`ConvergentSeries` and no modulus is given, the block
    series inherits one: blocks from K on lie past f(K) - 1, so the least K
    with f(K) >= N(eps) works.
    """
    if isinstance(s, ConvergentSeries):
        base = s
        stream = s.terms
    else:
        base = None
        stream = s
    fmap = _IndexMap(f)

    def block(k: int) -> Fraction:
        return stream.window_sum(fmap(k), fmap(k + 1) - 1)

    if modulus is None and base is not None:
        inner = base.modulus
        modulus = CauchyModulus(
            lambda eps: smallest_index(lambda k: fmap(k) >= inner(eps)),
            f"bracket({inner.name})",
        )
    return Bracketing(stream, fmap, TermStream(block, f"blocks({stream.name})"), modulus)


def apply_permutation(s: TermStream, sigma: Permutation) -> TermStream:
    """The rearranged stream n -> a_sigma(n)."""
    return TermStream(lambda n: s.term(sigma(n)), f"{s.name}o{sigma.name}")


def coverage_index(sigma: Permutation, n: int) -> int:
    """Return M = coverage(n) after checking {1..n} appears in sigma(1..M)."""
    if n < 1:
        raise ValueError(f"coverage index needs n >= 1, got {n}")
    m = sigma.coverage(n)
    sigma.prefix(m)
    pos = sigma._pos
    for v in range(1, n + 1):
        p = pos.get(v)
        if p is None or p > m:
            raise CertificateViolation(
                f"{sigma.name}: coverage({n}) = {m} but {v} is not among the first {m} images",
                value=(n, m, v),
            )
    return m


def limit_approx(cs: ConvergentSeries, eps) -> Fraction:
    """A rational within ``eps`` of the sum, trusting the modulus."""
    return cs.terms.partial_sum(cs.modulus(eps))


def permuted_series(cs: ConvergentSeries, sigma: Permutation) -> ConvergentSeries:
    """Rearrange an absolutely convergent series, carrying a modulus along.

    If sum_{n >= N}|a_n| <= eps then every position past coverage(N - 1)
    holds an index >= N, so windows there are bounded by eps as well.
    """
    if cs.absolute_modulus is None:
        raise ValueError("rearranging with a modulus needs an absolute modulus")
    am = cs.absolute_modulus

    def bound(eps: Fraction) -> int:
        return sigma.coverage(am(eps) - 1) + 1

    mod = CauchyModulus(bound, f"rearranged({am.name})")
    return ConvergentSeries(apply_permutation(cs.terms, sigma), mod, mod, f"{cs.name}o{sigma.name}")

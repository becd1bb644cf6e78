"""Rearranging a conditionally convergent series to any target.

The finite-target schedule is the classical greedy crossing: take the
lowest unused nonnegative term while the running sum is <= target, otherwise
the lowest unused negative term.  The infinite targets push the sum past
1, 2, 3, ... (or below -1, -2, ...) with one balancing term in between.
Divergence certificates bound how far each phase may search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import (
    ZERO,
    _Acc,
    _fraction,
    Permutation,
    TermStream,
    as_rational,
    format_rational,
    parse_rational,
)
from .errors import CertificateViolation


@dataclass
class SignSplit:
    plus: TermStream
    minus: TermStream


def sign_split(s: TermStream) -> SignSplit:
    """a_n = plus_n - minus_n and |a_n| = plus_n + minus_n, both parts >= 0."""
    return SignSplit(
        s.map(lambda a: a if a > 0 else ZERO, f"{s.name}+"),
        s.map(lambda a: -a if a < 0 else ZERO, f"{s.name}-"),
    )


class DivergenceCertificate:
    """Map C -> M such that the certified stream's partial sum at M exceeds C."""

    def __init__(self, exceed: Callable[[Fraction], int], name: str = "divergence"):
        self._exceed = exceed
        self.name = name

    def __call__(self, c) -> int:
        c = as_rational(c)
        if c <= 0:
            raise ValueError(f"divergence certificate needs C > 0, got {c}")
        return int(self._exceed(c))

    def verify(self, stream: TermStream, c) -> int:
        m = self(c)
        total = stream.partial_sum(m)
        if not total > as_rational(c):
            raise CertificateViolation(
                f"{self.name}: partial sum {total} at {m} does not exceed {c}", value=total
            )
        return m


@dataclass(frozen=True)
class RearrangementTarget:
    kind: str  # "finite", "+inf" or "-inf"
    value: Fraction | None = None

    @classmethod
    def finite(cls, x) -> "RearrangementTarget":
        return cls("finite", as_rational(x))

    @classmethod
    def plus_infinity(cls) -> "RearrangementTarget":
        return cls("+inf")

    @classmethod
    def minus_infinity(cls) -> "RearrangementTarget":
        return cls("-inf")

    @classmethod
    def parse(cls, text: str) -> "RearrangementTarget":
        t = text.strip().lower()
        if t in ("+inf", "inf", "+infinity", "infinity"):
            return cls.plus_infinity()
        if t in ("-inf", "-infinity"):
            return cls.minus_infinity()
        return cls.finite(parse_rational(text))

    def __post_init__(self):
        if self.kind not in ("finite", "+inf", "-inf"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if (self.kind == "finite") != (self.value is not None):
            raise ValueError("finite targets carry a value, infinite ones do not")

    def __str__(self) -> str:
        return format_rational(self.value) if self.kind == "finite" else self.kind


@dataclass
class Switch:
    """End of a phase: ``position`` is the last position of the phase."""

    position: int
    index: int
    sign: int  # +1 for a nonnegative phase, -1 for a negative one
    partial_sum: Fraction | None = None
    ok: bool = True


def _above(q) -> Fraction:
    # an integer C >= 1 strictly above q; certificates are monotone, and a small
    # argument avoids normalizing huge accumulated fractions
    return Fraction(max(1, int(q.__floor__()) + 1))


class _Schedule:
    def __init__(self, s, target, cert_plus, cert_minus, keep_sums):
        self.s = s
        self.target = target
        self.x = _Acc(target.value) if target.kind == "finite" else None
        self.cert_plus = cert_plus
        self.cert_minus = cert_minus
        self.keep_sums = keep_sums
        self.order: list[int] = []
        self.pos: dict[int, int] = {}
        self.total = _Acc(0)
        self.used_plus = _Acc(0)
        self.used_minus = _Acc(0)
        self.next_nonneg = 1
        self.next_neg = 1
        self.phase = 0
        self.bound = 0
        self.level = 1  # k for the infinite schedules
        self.switches: list[Switch] = []
        self.boundaries: list[tuple[int, int, Fraction]] = []
        self._cov = [0]

    def _scan(self, start: int, nonneg: bool) -> int:
        n = start
        while (self.s.term(n) >= 0) != nonneg:
            n += 1
            if n > self.bound:
                break
        return n

    def _start_phase(self, sign: int, need):
        self.bound = (self.cert_plus if sign > 0 else self.cert_minus)(_above(need))
        self.phase = sign

    def _end_phase(self):
        if not self.order:
            return
        p = len(self.order)
        idx = self.order[-1]
        ok = True
        if self.target.kind == "finite":
            gap = abs(self.total - self.x)
            ok = gap <= _Acc(abs(self.s.term(idx)))
            if not ok:
                raise CertificateViolation(
                    f"switch at {p}: |S - x| = {_fraction(gap)} exceeds |a_{idx}|",
                    value=_fraction(self.total),
                )
        self.switches.append(Switch(p, idx, self.phase, _fraction(self.total) if self.keep_sums else None, ok))

    def _take(self, sign: int):
        if sign > 0:
            i = self._scan(self.next_nonneg, nonneg=True)
            if i > self.bound:
                raise CertificateViolation(
                    f"positive phase scanned past certificate bound {self.bound} without crossing",
                    value=_fraction(self.total),
                )
            self.next_nonneg = i + 1
            a = self.s.term(i)
            self.used_plus += a
        else:
            i = self._scan(self.next_neg, nonneg=False)
            if i > self.bound:
                raise CertificateViolation(
                    f"negative phase scanned past certificate bound {self.bound} without crossing",
                    value=_fraction(self.total),
                )
            self.next_neg = i + 1
            a = self.s.term(i)
            self.used_minus -= a
        self.total += a
        self.order.append(i)
        self.pos[i] = len(self.order)

    def step(self):
        kind = self.target.kind
        if kind == "finite":
            x = self.x
            sign = 1 if self.total <= x else -1
            if sign != self.phase:
                self._end_phase()
                need = x + self.used_minus if sign > 0 else self.used_plus - x
                self._start_phase(sign, need)
            self._take(sign)
            return
        # infinite targets: a long phase toward +-level, then one balancing term
        up = kind == "+inf"
        main = 1 if up else -1
        if self.phase == 0:
            self._start_phase(main, self.level + (self.used_minus if up else self.used_plus))
        if self.phase == main:
            self._take(main)
            crossed = self.total > self.level if up else self.total < -self.level
            if crossed:
                self._end_phase()
                self.boundaries.append((len(self.order), self.level, _fraction(self.total)))
                self.phase = -main
                # one balancing term; its search is bounded by the opposite certificate
                self.bound = (self.cert_minus if up else self.cert_plus)(_above(self.used_minus if up else self.used_plus))
        else:
            self._take(-main)
            self._end_phase()
            self.level += 1
            self._start_phase(main, self.level + (self.used_minus if up else self.used_plus))

    def extend(self, n: int):
        while len(self.order) < n:
            self.step()

    def image(self, n: int) -> int:
        self.extend(n)
        return self.order[n - 1]

    def coverage(self, n: int) -> int:
        cov = self._cov
        while len(cov) <= n:
            v = len(cov)
            while v not in self.pos:
                self.step()
            cov.append(max(cov[-1], self.pos[v]))
        return cov[n]


class RiemannPermutation(Permutation):
    """Permutation produced by :func:`riemann_permutation`, with its schedule log."""

    def __init__(self, schedule: _Schedule, term_decay, name: str):
        super().__init__(schedule.image, schedule.coverage, name)
        self.schedule = schedule
        self.target = schedule.target
        self._term_decay = term_decay

    @property
    def switches(self) -> list[Switch]:
        return self.schedule.switches

    @property
    def boundaries(self) -> list[tuple[int, int, Fraction]]:
        """(position, level, partial sum) at the end of each main phase (infinite targets)."""
        return self.schedule.boundaries

    def emitted_sum(self, n: int) -> Fraction:
        """Partial sum of the rearranged series after exactly ``n`` emitted terms."""
        sched = self.schedule
        sched.extend(n)
        if n == len(sched.order):
            return _fraction(sched.total)
        return _fraction(sum((sched.s.term(i) for i in sched.order[:n]), _Acc(0)))

    def convergence_position(self, eps) -> int:
        """A position P with |S_p - target| <= eps for every p >= P.

        Past coverage(N - 1), N = term_decay(eps), every new term is at most
        eps in size, and from the next switch on each phase stays within eps.
        """
        if self.target.kind != "finite":
            raise ValueError("convergence position only exists for finite targets")
        if self._term_decay is None:
            raise ValueError("convergence position needs a term-decay certificate")
        eps = as_rational(eps)
        p0 = self.coverage(self._term_decay(eps) - 1)
        sched = self.schedule
        i = 0
        while True:
            while i >= len(sched.switches):
                sched.step()
            if sched.switches[i].position > p0:
                return sched.switches[i].position
            i += 1


def riemann_permutation(
    s: TermStream,
    target: RearrangementTarget,
    cert_plus: DivergenceCertificate,
    cert_minus: DivergenceCertificate,
    term_decay: Callable[[Fraction], int] | None = None,
    keep_sums: bool = False,
) -> RiemannPermutation:
    """Permutation whose rearrangement of ``s`` converges to (or diverges to) ``target``.

    ``cert_plus``/``cert_minus`` certify divergence of the positive and
    negative parts; a phase that scans past its certified bound raises
    :class:`CertificateViolation`.  With ``keep_sums`` each switch record keeps
    its exact partial sum (costly when denominators are large).
    """
    sched = _Schedule(s, target, cert_plus, cert_minus, keep_sums)
    return RiemannPermutation(sched, term_decay, f"riemann({target})")

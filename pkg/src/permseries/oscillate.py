"""Oscillating rearrangements between two different sums.

Given a convergent series with sum s and a permutation sigma whose
rearranged series has a bracketing converging to t != s, the permutation tau
built here alternates between following the original order (partial sums
near s) and following sigma (partial sums near t).  Every block between
consecutive switch points then has magnitude above delta/3, where delta is
a caller-certified lower bound on |s - t|.

Limits only enter through ``limit_approx`` with error delta/12.  The switch
thresholds sit at s~ + delta/4 and t~ - delta/4 (mirrored for the other
side), so the true sums are strictly inside and the thresholds are at least
delta/3 apart.  Each k_i is then found by exact search and every block is
re-summed from tau's values and compared with delta/3.

Threading: single-threaded, like the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import (
    _Acc,
    _fraction,
    Bracketing,
    ConvergentSeries,
    Permutation,
    TermStream,
    as_rational,
    limit_approx,
)
from .errors import BudgetExceeded, ModulusViolation, SeparationViolation

SIDES = ("s_below_t", "t_below_s")

DEFAULT_BUDGET = 200_000


class _Oscillation:
    def __init__(self, a: ConvergentSeries, sigma: Permutation, br: Bracketing, delta: Fraction, side: str,
                 budget: int):
        self.a = a.terms
        self.sigma = sigma
        self.rearranged = br.series
        self.f = br.f
        self.delta = delta
        self.budget = budget
        self.sign = 1 if side == "s_below_t" else -1
        q = delta / 12
        self.s_approx = limit_approx(a, q)
        if br.modulus is None:
            raise ValueError("the bracketing needs its own Cauchy modulus")
        kt = br.modulus(q)
        self.t_approx = br.blocks.partial_sum(kt)
        gap = (self.t_approx - self.s_approx) * self.sign
        if gap < delta - delta / 6:
            raise SeparationViolation(
                f"approximations s~ = {self.s_approx}, t~ = {self.t_approx} are not {delta} apart on side {side}",
                value=self.t_approx - self.s_approx,
            )
        # odd steps must land beyond low, even steps beyond high (in the side's direction)
        self.low = _Acc(self.s_approx + self.sign * delta / 4)
        self.high = _Acc(self.t_approx - self.sign * delta / 4)
        self.ks: list[int] = []
        self.sums: list[Fraction] = []  # exact partial sums of a o tau at f(k_i)
        self.blocks: list[Fraction] = []
        self.tau: list[int] = []
        self.used: set[int] = set()
        self.max_used = 0
        self.max_sigma_pos = 0

    def _f(self, k: int) -> int:
        v = self.f(k)
        if v > self.budget:
            raise BudgetExceeded(
                f"oscillation needs positions beyond the budget {self.budget} (f({k}) = {v})", value=v
            )
        return v

    def _below_low(self, total) -> bool:
        return total < self.low if self.sign > 0 else total > self.low

    def _above_high(self, total) -> bool:
        return total > self.high if self.sign > 0 else total < self.high

    def _use(self, v: int):
        self.tau.append(v)
        self.used.add(v)
        if v > self.max_used:
            self.max_used = v
        p = self.sigma.position(v)
        if p > self.max_sigma_pos:
            self.max_sigma_pos = p

    def step(self):
        i = len(self.ks) + 1
        k = self.ks[-1] + 1 if self.ks else 1
        if i % 2 == 1:
            # follow the original order: f(k) must cover every used index
            while True:
                n = self._f(k)
                if n >= self.max_used and self._below_low(self.a._sum(n)):
                    break
                k += 1
            for v in range(1, n + 1):
                if v not in self.used:
                    self._use(v)
        else:
            # follow sigma: its first f(k) values must include every used index
            while True:
                n = self._f(k)
                if n >= self.max_sigma_pos and self._above_high(self.rearranged._sum(n)):
                    break
                k += 1
            for p in range(1, n + 1):
                v = self.sigma(p)
                if v not in self.used:
                    self._use(v)
        if len(self.tau) != n:
            raise ModulusViolation(f"tau has {len(self.tau)} values at f(k_{i}) = {n}", value=n)
        self.ks.append(k)
        lo = self.f(self.ks[-2]) if i > 1 else 0
        block = _Acc(0)
        for v in self.tau[lo:n]:
            block += self.a.term(v)
        total = (self.sums[-1] if self.sums else 0) + _fraction(block)
        self.sums.append(total)
        if i > 1:
            b = _fraction(block)
            if not abs(b) > self.delta / 3:
                raise ModulusViolation(
                    f"block {i - 1} = {b} does not exceed delta/3 = {self.delta / 3}", value=b
                )
            self.blocks.append(b)

    def realize_blocks(self, count: int):
        while len(self.blocks) < count:
            self.step()

    def image(self, n: int) -> int:
        while len(self.tau) < n:
            self.step()
        return self.tau[n - 1]

    def coverage(self, n: int) -> int:
        # after an odd step tau(1..f(k_i)) = {1..f(k_i)}
        i = 0
        while True:
            while i >= len(self.ks):
                self.step()
            if i % 2 == 0 and self.f(self.ks[i]) >= n:
                return self.f(self.ks[i])
            i += 1


@dataclass
class OscillationWitness:
    tau: Permutation
    separation: Fraction
    f: Callable[[int], int]
    side: str
    _state: _Oscillation = field(repr=False)

    @property
    def s_approx(self) -> Fraction:
        return self._state.s_approx

    @property
    def t_approx(self) -> Fraction:
        return self._state.t_approx

    def k(self, i: int) -> int:
        """k_i (1-based), realizing the construction as far as needed."""
        st = self._state
        while len(st.ks) < i:
            st.step()
        return st.ks[i - 1]

    def block_bounds(self, count: int) -> list[int]:
        self.k(count)
        return list(self._state.ks[:count])

    def block(self, i: int) -> Fraction:
        """Exact sum of a_tau(n) over f(k_i) < n <= f(k_(i+1))."""
        self._state.realize_blocks(i)
        return self._state.blocks[i - 1]

    def switch_sum(self, i: int) -> Fraction:
        """Exact partial sum of a o tau at f(k_i)."""
        self.k(i)
        return self._state.sums[i - 1]


def build_oscillation(a: ConvergentSeries, sigma: Permutation, br: Bracketing, delta, side: str = "s_below_t",
                      budget: int = DEFAULT_BUDGET) -> OscillationWitness:
    """Build tau and (k_i) so that every block between f(k_i) and f(k_(i+1)) exceeds delta/3.

    ``br`` brackets the sigma-rearranged series and must carry a modulus.
    ``delta`` must satisfy 0 < delta <= |s - t| with the order given by
    ``side``.  Positions past ``budget`` raise :class:`BudgetExceeded`.
    """
    delta = as_rational(delta)
    if delta <= 0:
        raise ValueError(f"separation must be positive, got {delta}")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    state = _Oscillation(a, sigma, br, delta, side, budget)
    tau = Permutation(state.image, state.coverage, f"tau({sigma.name})")
    return OscillationWitness(tau, delta, br.f, side, state)


def divergence_witness(w: OscillationWitness, a: TermStream, c) -> int:
    """M with |a_1| + ... + |a_M| > C, read off the oscillation.

    With j = floor(3C/delta) + 2 the first j - 1 blocks carry more than
    (j - 1) delta / 3 > C of absolute mass, and M bounds the indices tau
    used up to f(k_j).
    """
    c = as_rational(c)
    if c <= 0:
        raise ValueError(f"C must be positive, got {c}")
    j = (3 * c / w.separation).__floor__() + 2
    n = w.f(w.k(j))
    m = max(w.tau.prefix(n))
    total = _Acc(0)
    for i in range(1, m + 1):
        total += abs(a.term(i))
        if total > c:
            return m
    raise ModulusViolation(f"sum of |a_n| up to {m} is {_fraction(total)}, not above {c}", value=_fraction(total))

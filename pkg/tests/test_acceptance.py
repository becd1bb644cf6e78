"""Acceptance criteria, one test each, at the stated tolerances.

Every test appends a PASS/FAIL line to the acceptance summary printed at
the end of the run, and prints the same line to stdout.
"""

import random
import time
from fractions import Fraction

import mpmath
import pytest

from conftest import ACCEPTANCE_LINES
from permseries import bdn, catalog
from permseries.core import (
    Permutation,
    TermStream,
    bracket_series,
    coverage_index,
    limit_approx,
    permuted_series,
)
from permseries.errors import BudgetExceeded, ConstructionError, TailViolation
from permseries.instrument import (
    Member,
    PlusTailPredicate,
    Unknown,
    bad_intervals,
    interval_oracle,
    kappa,
    kappa_witnesses,
    lambda_stream,
    rational_oracle,
    rationalize,
    sigma_from_lambda,
    verify_sig1,
)
from permseries.oscillate import build_oscillation, divergence_witness
from permseries.rearrange import RearrangementTarget, riemann_permutation

pytestmark = pytest.mark.acceptance


class Record:
    def __init__(self, number: int):
        self.number = number
        self.failures: list[str] = []
        self.notes: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, what: str) -> bool:
        if not ok:
            self.failures.append(what)
        return ok

    def note(self, text: str):
        self.notes.append(text)

    def finish(self):
        secs = time.perf_counter() - self.start
        verdict = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.notes + self.failures) + f" ({secs:.1f}s)"
        ACCEPTANCE_LINES.append((self.number, verdict, detail))
        print(f"criterion {self.number}: {verdict}  {detail}")
        assert not self.failures, detail


def plain_sum(stream, n):
    total = Fraction(0)
    for i in range(1, n + 1):
        total += stream.term(i)
    return total


# 1 -----------------------------------------------------------------------

def random_series(rng):
    kind = rng.choice(["alt-harmonic", "geometric", "literal", "bdn"])
    if kind == "alt-harmonic":
        return catalog.alt_harmonic().terms
    if kind == "geometric":
        return catalog.geometric(Fraction(rng.randint(-9, 9), 10)).terms
    if kind == "literal":
        vals = [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(rng.randint(1, 60))]
        return catalog.literal(vals).terms
    s = rng.choice([bdn.finite_sup([1, 2, 3]), bdn.identity_set(), bdn.custom([1] * 9 + [2] * 30 + [5])])
    return bdn.bdn_series(s).signed


def random_index_map(rng):
    kind = rng.choice(["identity", "odd", "dyadic", "gaps"])
    if kind == "identity":
        return (lambda k: k), 200
    if kind == "odd":
        return (lambda k: 2 * k - 1), 200
    if kind == "dyadic":
        return (lambda k: 2 ** (k - 1)), 12
    points = [1]
    for _ in range(201):
        points.append(points[-1] + rng.randint(1, 6))
    return (lambda k: points[k - 1]), 200


def test_criterion_1_telescoping():
    rec = Record(1)
    rng = random.Random(20240601)
    for trial in range(500):
        stream = random_series(rng)
        f, kmax = random_index_map(rng)
        big_k = rng.randint(1, kmax)
        blocks = bracket_series(stream, f).blocks
        lhs = sum((blocks.term(k) for k in range(1, big_k + 1)), Fraction(0))
        rhs = plain_sum(stream, f(big_k + 1) - 1)
        rec.check(lhs == rhs, f"trial {trial}: {lhs} != {rhs}")
    rec.note("500 triples exact")
    rec.finish()


# 2 -----------------------------------------------------------------------

def test_criterion_2_rearranged_geometric():
    rec = Record(2)
    g = catalog.geometric(Fraction(-1, 2))
    perms = [
        catalog.identity(), catalog.two_pos_one_neg(), catalog.pair_swap(), catalog.block_reverse(3),
        catalog.block_reverse(7), catalog.growing_block_reverse(), catalog.block_shuffle(1, 5),
        catalog.block_shuffle(2, 11), catalog.transposition(1, 40), catalog.explicit([5, 3, 1, 2, 4]),
    ]
    for sigma in perms:
        for n in (10, 100, 1000):
            coverage_index(sigma, n)
        rs = permuted_series(g, sigma)
        for eps in (Fraction(1, 10**3), Fraction(1, 10**6)):
            r0 = limit_approx(g, eps)
            r1 = limit_approx(rs, eps)
            rec.check(abs(r0 - r1) <= 2 * eps, f"{sigma.name} eps={eps}: differ by {abs(r0 - r1)}")
            rec.check(abs(r0 + Fraction(1, 3)) <= eps, f"eps={eps}: original off -1/3 by {abs(r0 + Fraction(1, 3))}")
    rec.note("10 permutations, eps 1e-3 and 1e-6")
    rec.finish()


# 3 -----------------------------------------------------------------------

@pytest.mark.parametrize("x", [Fraction(0), Fraction(1, 2), Fraction(-2)], ids=["0", "1/2", "-2"])
def test_criterion_3_riemann_targets(x):
    rec = Record(3)
    s = catalog.alt_harmonic().terms
    plus, minus, decay = catalog.alt_harmonic_certificates()
    sigma = riemann_permutation(s, RearrangementTarget.finite(x), plus, minus, decay, keep_sums=True)
    sigma.prefix(2000)
    for sw in sigma.switches:
        rec.check(abs(sw.partial_sum - x) <= abs(s.term(sw.index)), f"switch at {sw.position} misses the bound")
    sigma.schedule.keep_sums = False
    sigma.prefix(10**5)
    rec.check(all(sw.ok for sw in sigma.switches), "a switch failed its exact bound check")
    err = abs(sigma.emitted_sum(10**5) - x)
    rec.check(err <= Fraction(1, 10**3), f"target {x}: error {float(err):.3g} after 1e5 terms")
    coverage_index(sigma, 10**3)
    rec.note(f"target {x}: {len(sigma.switches)} switches, error {float(err):.2g}")
    rec.finish()


# 4 -----------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["+inf", "-inf"])
def test_criterion_4_infinite_targets(kind):
    rec = Record(4)
    plus, minus, _ = catalog.repeated_harmonic_certificates()
    sigma = riemann_permutation(catalog.repeated_harmonic().terms, RearrangementTarget.parse(kind), plus, minus)
    while len(sigma.boundaries) < 10:
        sigma.schedule.step()
    sign = 1 if kind == "+inf" else -1
    levels = [lvl for _, lvl, _ in sigma.boundaries[:10]]
    rec.check(levels == list(range(1, 11)), f"levels out of order: {levels}")
    for _, lvl, total in sigma.boundaries[:10]:
        rec.check(sign * total > lvl, f"level {lvl}: boundary sum {total}")
    pos = sigma.boundaries[9][0]
    rec.check(len(set(sigma.prefix(pos))) == pos, "indices repeat")
    rec.note(f"{kind}: levels 1..10 passed by position {pos}")
    rec.finish()


# 5 -----------------------------------------------------------------------

def ah_oscillation(**kw):
    a = catalog.alt_harmonic()
    rearranged, sigma = catalog.alt_harmonic_two_pos_one_neg()
    return a, build_oscillation(a, sigma, bracket_series(rearranged, lambda k: k), Fraction(1, 3), **kw)


def test_criterion_5_oscillation_blocks():
    rec = Record(5)
    _, w = ah_oscillation()
    blocks = [w.block(i) for i in range(1, 6)]
    for i, b in enumerate(blocks, 1):
        rec.check(abs(b) > Fraction(1, 9), f"block {i} = {b}")
        ks = w.block_bounds(i + 1)
        direct = sum((catalog.alt_harmonic().terms.term(w.tau(n)) for n in range(w.f(ks[i - 1]) + 1, w.f(ks[i]) + 1)),
                     Fraction(0))
        rec.check(direct == b, f"block {i} recomputed as {direct}")
    m = coverage_index(w.tau, 10**3)
    rec.check(len(set(w.tau.prefix(m))) == m, "tau repeats an index")
    rec.note("blocks " + ", ".join(str(b) for b in blocks) + f"; coverage(1000) = {m}")
    rec.finish()


# 6 -----------------------------------------------------------------------

ACCEPTANCE_BUDGET = 2**15


def test_criterion_6_divergence_witness():
    rec = Record(6)
    a, w = ah_oscillation(budget=ACCEPTANCE_BUDGET)
    for c in (1, 2, 5):
        try:
            m = divergence_witness(w, a.terms, c)
        except BudgetExceeded as e:
            rec.check(False, f"C={c}: budget {ACCEPTANCE_BUDGET} exhausted ({e})")
            continue
        total = sum((Fraction(1, n) for n in range(1, m + 1)), Fraction(0))
        rec.check(total > c, f"C={c}: M={m} gives only {total}")
        rec.note(f"C={c}: M={m}")
    rec.finish()


# 7 -----------------------------------------------------------------------

BOUNDED = bdn.finite_sup([1, 2, 3])
JUMPS = bdn.custom([1] * 19 + [2] * 50 + [3] * 130 + [4])


def test_criterion_7_bdn_series():
    rec = Record(7)
    for s in (bdn.identity_set(), BOUNDED):
        series = bdn.bdn_series(s)
        for k in range(1, 13):
            spread = bdn.window_spread(series.signed, 2**k + 1, 2 ** (k + 1))
            rec.check(spread < Fraction(1, 2**k), f"{s.name} k={k}: spread {spread}")
            if bdn.lambda_bit(s, k) == 1:
                mass = bdn.block_mass(series, k)
                rec.check(mass > Fraction(1, 2), f"{s.name} k={k}: mass {mass}")
    perms = [catalog.identity, catalog.two_pos_one_neg, lambda: catalog.block_shuffle(11, 7)]
    for s in (BOUNDED, JUMPS):
        for make in perms:
            sigma = make()
            wb = bdn.weak_bracketing(s, sigma)
            for i in range(1, 9):
                b, k = wb.block(i), wb.selected(i)
                rec.check(abs(b) < Fraction(1, 2**k), f"{s.name}/{sigma.name} block {i}: {b}")
    rec.note("windows k<=12 on identity and bounded sets; 8 weak blocks under 3 permutations")
    rec.finish()


# 8 -----------------------------------------------------------------------

def test_criterion_8_bound_from_convergence():
    rec = Record(8)
    got = bdn.bounded_from_convergence(BOUNDED, 2, 14)
    rec.check(got == 3, f"bounded set gave {got}")
    for n in range(1, 13):
        try:
            bdn.bounded_from_convergence(bdn.identity_set(), n, 14)
            rec.check(False, f"identity set with N={n} gave no tail violation")
        except TailViolation:
            pass
    rec.note("bound 3; identity violates for N=1..12")
    rec.finish()


# 9 -----------------------------------------------------------------------

def check_lambda_prefix(rec, lam, upto, a, tag):
    p = lam.p
    bits = lam.prefix(upto)
    rec.check(bits[0] == 0, f"{tag}: lambda_1 = 1")
    for n in range(1, upto):
        if bits[n - 1] == 0 and bits[n] == 1:
            rec.check(n + 1 in lam.run_witness and p.phi(lam.run_witness[n + 1], n + 1) == 0,
                      f"{tag}: run at {n + 1} lacks a membership witness")
        if bits[n - 1] == 0 and bits[n] == 0:
            rec.check(lam.s(n + 1) <= n + 1, f"{tag}: stayed at 0 past s_{n + 1}")
    ivs = bad_intervals(lam, upto)
    sigma = sigma_from_lambda(a, ivs)
    for iv in ivs:
        rec.check(kappa(p, iv.lo, iv.hi - iv.lo + 1) == Member(iv.hi), f"{tag}: run {tuple(iv)} not closed at kappa")
        rec.check(bits[iv.hi] == 0, f"{tag}: run {tuple(iv)} not followed by 0")
        j, k = verify_sig1(a, sigma, iv, p.eps)
        total = sum((a.term(sigma(i)) for i in range(j + 1, k + 1)), Fraction(0))
        rec.check(total >= p.eps, f"{tag}: sig1 window on {tuple(iv)} sums to {total}")
        images = sorted(sigma(n) for n in range(iv.lo, iv.hi + 1))
        rec.check(images == list(range(iv.lo, iv.hi + 1)), f"{tag}: sigma not a bijection on {tuple(iv)}")
    return len(ivs)


def test_criterion_9_instrument():
    rec = Record(9)
    a = catalog.alt_harmonic().terms
    p = PlusTailPredicate(a, Fraction(1, 2))
    rec.check(kappa(p, 2, 100) == Member(5), "kappa(2) != 5")
    g = PlusTailPredicate(catalog.geometric(Fraction(-1, 2)).terms, Fraction(1, 10))
    members = [n for n in range(1, 51) if isinstance(kappa(g, n, 10**4), Member)]
    rec.check(members == [1], f"S on geometric = {members}")
    rec.check(kappa(g, 2, 10**4) == Unknown(10**4 + 2), "kappa(2) on geometric not unknown")
    rng = random.Random(7)
    eps = Fraction(1, 4)
    p = PlusTailPredicate(a, eps)
    runs = 0
    for trial in range(20):
        points = [1]
        for _ in range(1100):
            points.append(points[-1] + (rng.randint(1, 4) if rng.random() < 0.3 else 1))

        def s_seq(n, points=points):
            return points[n - 1]

        lam = lambda_stream(p, s_seq, kappa_witnesses(p, s_seq, 10**5))
        runs += check_lambda_prefix(rec, lam, 1000, a, f"sequence {trial}")
    rec.note(f"kappa(2)=5; S={{1}} on geometric; 20 sequences, {runs} bad intervals checked")
    rec.finish()


# 10 ----------------------------------------------------------------------

def test_criterion_10_rationalization():
    rec = Record(10)
    families = {
        "rational": (rational_oracle(lambda i: Fraction((-1) ** (i + 1), i)), lambda i: mpmath.mpf((-1) ** (i + 1)) / i),
        "pi-scaled": (interval_oracle(lambda i, iv: (-1) ** (i + 1) * iv.pi / i), lambda i: (-1) ** (i + 1) * mpmath.pi / i),
        "e-scaled": (interval_oracle(lambda i, iv: iv.e / (i * i)), lambda i: mpmath.e / (i * i)),
    }
    for name, (oracle, real) in families.items():
        r = rationalize(oracle)
        for i in range(1, 51):
            c = r.terms.term(i)
            rec.check(isinstance(c, Fraction), f"{name} c_{i} not rational")
            lo, hi = r.shift_bounds(i)
            rec.check(0 < lo and hi < Fraction(1, 2**i), f"{name} i={i}: shift in [{lo}, {hi}]")
            with mpmath.workdps(60):
                b = mpmath.mpf(c.numerator) / c.denominator - real(i)
                rec.check(0 < b < mpmath.mpf(2) ** -i, f"{name} i={i}: independent shift {b}")
    rec.note("3 families x 50 shifts in (0, 2^-i)")
    rec.finish()

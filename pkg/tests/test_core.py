from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permseries import catalog
from permseries.core import (
    CauchyModulus,
    ConvergentSeries,
    Permutation,
    TermStream,
    apply_permutation,
    as_rational,
    bracket_series,
    coverage_index,
    format_rational,
    limit_approx,
    parse_rational,
    partial_sum,
    permuted_series,
    verify_modulus,
    zero_stream,
)
from permseries.errors import BracketingError, CertificateViolation, InjectivityError, ModulusViolation

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)


def test_partial_sum_examples():
    assert partial_sum(zero_stream(), 10) == 0
    assert partial_sum(catalog.alt_harmonic().terms, 4) == Fraction(7, 12)
    assert partial_sum(catalog.alt_harmonic().terms, 0) == 0


def test_partial_sum_rejects_negative():
    with pytest.raises(ValueError):
        partial_sum(zero_stream(), -1)


def test_partial_sums_past_checkpoints_match_naive():
    s = TermStream(lambda n: Fraction((-1) ** n * n, n * n + 1))
    naive = Fraction(0)
    expected = {}
    for n in range(1, 1300):
        naive += s.term(n)
        expected[n] = naive
    for n in (1299, 7, 600, 513, 512, 1024, 1, 1025):
        assert s.partial_sum(n) == expected[n]
    for n, total in s.iter_partial_sums(1000):
        assert total == expected[n]
        if n == 1100:
            break


def test_terms_are_memoized():
    calls = []

    def term(n):
        calls.append(n)
        return Fraction(1, n)

    s = TermStream(term)
    s.prefix(5)
    s.prefix(5)
    assert s.term(3) == Fraction(1, 3)
    assert calls == [1, 2, 3, 4, 5]


def test_floats_refused():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        TermStream(lambda n: 0.5).term(1)


def test_rational_text_round_trip():
    assert parse_rational("-7/12") == Fraction(-7, 12)
    assert format_rational(Fraction(-7, 12)) == "-7/12"
    assert format_rational(Fraction(4, 2)) == "2"
    assert parse_rational(" 6/4 ") == Fraction(3, 2)
    for bad in ("1.5", "1/0", "x", "1//2", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


@given(rationals)
def test_format_parse_inverse(q):
    assert parse_rational(format_rational(q)) == q


def test_bracket_examples():
    ah = catalog.alt_harmonic().terms
    br = bracket_series(ah, lambda k: k)
    assert br.blocks.prefix(6) == ah.prefix(6)
    odd = bracket_series(ah, lambda k: 2 * k - 1)
    assert odd.blocks.term(1) == Fraction(1, 2)
    assert odd.blocks.term(2) == Fraction(1, 12)
    with pytest.raises(BracketingError):
        bracket_series(ah, lambda k: k + 1)


def test_bracket_detects_non_increase_lazily():
    br = bracket_series(catalog.alt_harmonic().terms, lambda k: [1, 3, 5, 5][k - 1] if k <= 4 else 10 * k)
    assert br.blocks.term(2) == Fraction(1, 3) - Fraction(1, 4)
    with pytest.raises(BracketingError):
        br.blocks.term(4)


@given(st.lists(rationals, min_size=1, max_size=40), st.lists(st.integers(1, 5), min_size=1, max_size=20),
       st.integers(1, 20))
def test_telescoping(values, gaps, big_k):
    s = catalog.literal(values).terms
    points = [1]
    for g in gaps:
        points.append(points[-1] + g)

    def f(k):
        return points[k - 1] if k <= len(points) else points[-1] + (k - len(points))

    br = bracket_series(s, f)
    assert br.blocks.partial_sum(big_k) == s.partial_sum(f(big_k + 1) - 1)


def test_apply_permutation_examples():
    ah = catalog.alt_harmonic().terms
    assert apply_permutation(ah, catalog.identity()).prefix(8) == ah.prefix(8)
    assert apply_permutation(ah, catalog.transposition(1, 2)).prefix(2) == [Fraction(-1, 2), Fraction(1)]
    two = apply_permutation(ah, catalog.two_pos_one_neg())
    assert two.prefix(6) == [1, Fraction(1, 3), Fraction(-1, 2), Fraction(1, 5), Fraction(1, 7), Fraction(-1, 4)]


def test_coverage_examples():
    assert coverage_index(catalog.identity(), 100) == 100
    assert coverage_index(catalog.two_pos_one_neg(), 4) == 6
    broken = Permutation(lambda n: n, lambda n: n - 1, "broken")
    with pytest.raises(CertificateViolation) as err:
        coverage_index(broken, 5)
    assert err.value.value == (5, 4, 5)


def test_permutation_needs_certificate_and_injectivity():
    with pytest.raises(CertificateViolation):
        Permutation(lambda n: n, None)
    dup = Permutation(lambda n: min(n, 3), lambda n: n, "dup")
    with pytest.raises(InjectivityError):
        dup.prefix(4)


PERMS = [
    catalog.identity,
    catalog.two_pos_one_neg,
    catalog.pair_swap,
    lambda: catalog.block_reverse(4),
    catalog.growing_block_reverse,
    lambda: catalog.block_shuffle(3, 6),
    lambda: catalog.transposition(2, 9),
    lambda: catalog.explicit([3, 1, 2]),
]


@pytest.mark.parametrize("make", PERMS)
def test_catalog_permutations_cover_and_are_injective(make):
    sigma = make()
    for n in range(1, 300, 7):
        coverage_index(sigma, n)
    assert len(set(sigma.prefix(400))) == 400


def test_limit_approx_examples():
    assert limit_approx(catalog.zero_series(), Fraction(1, 100)) == 0
    g = catalog.geometric(Fraction(-1, 2))
    assert abs(limit_approx(g, Fraction(1, 100)) - Fraction(-1, 3)) <= Fraction(1, 100)
    r = limit_approx(catalog.alt_harmonic(), Fraction(1, 10))
    with mpmath.workdps(40):
        ln2 = mpmath.log(2)
        assert abs(mpmath.mpf(r.numerator) / r.denominator - ln2) <= mpmath.mpf(1) / 10


@pytest.mark.parametrize("make", [
    catalog.alt_harmonic,
    lambda: catalog.geometric(Fraction(-1, 2)),
    lambda: catalog.geometric(Fraction(2, 3)),
    catalog.repeated_harmonic,
    lambda: catalog.alt_harmonic_two_pos_one_neg()[0],
    lambda: catalog.literal([1, -2, Fraction(1, 3)]),
])
@pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 10), Fraction(1, 37)])
def test_demo_moduli_hold_on_windows(make, eps):
    cs = make()
    verify_modulus(cs.terms, cs.modulus, eps, cs.modulus(eps) + 400)
    if cs.absolute_modulus is not None:
        verify_modulus(cs.terms.map(abs), cs.absolute_modulus, eps, cs.absolute_modulus(eps) + 400)


def test_verify_modulus_catches_a_lie():
    lie = CauchyModulus(lambda eps: 1, "lie")
    with pytest.raises(ModulusViolation):
        verify_modulus(catalog.alt_harmonic().terms, lie, Fraction(1, 10), 50)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=2), st.fractions(min_value=Fraction(1, 1000), max_value=2))
def test_moduli_nonincreasing_in_eps(e1, e2):
    lo, hi = min(e1, e2), max(e1, e2)
    for cs in (catalog.alt_harmonic(), catalog.geometric(Fraction(-1, 2)), catalog.repeated_harmonic()):
        assert cs.modulus(hi) <= cs.modulus(lo)


def test_modulus_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        catalog.alt_harmonic().modulus(0)


def test_grouped_modulus_sum_is_three_halves_ln2():
    cs, _ = catalog.alt_harmonic_two_pos_one_neg()
    r = limit_approx(cs, Fraction(1, 50))
    assert abs(float(r) - 1.5 * mpmath.log(2)) <= 1 / 50


def test_permuted_series_carries_absolute_modulus():
    g = catalog.geometric(Fraction(-1, 2))
    rs = permuted_series(g, catalog.growing_block_reverse())
    verify_modulus(rs.terms, rs.modulus, Fraction(1, 1000), rs.modulus(Fraction(1, 1000)) + 200)
    with pytest.raises(ValueError):
        permuted_series(catalog.alt_harmonic(), catalog.identity())


def test_convergent_series_is_plain_data():
    cs = ConvergentSeries(zero_stream(), CauchyModulus(lambda e: 1))
    assert cs.name == "series" and cs.absolute_modulus is None

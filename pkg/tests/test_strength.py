import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hashecon.errors import DomainError
from hashecon.strength import (
    BruteForceEstimator,
    PatternEstimator,
    PrecomputedStrengths,
    charset_size,
    estimate_strength,
    load_default_wordlist,
)


@pytest.fixture(scope="module")
def estimator():
    return PatternEstimator()


class TestBruteForce:
    def test_lowercase_run(self):
        est = BruteForceEstimator()
        assert est.strength_bits("qxkvzjwmqp") == pytest.approx(10 * math.log2(26))
        assert est.strength_bits("qxkvzjwmqp") == pytest.approx(47.0, abs=0.01)

    def test_charset_accumulation(self):
        assert charset_size("abc") == 26
        assert charset_size("aB1") == 62
        assert charset_size("aB1!") == 95
        assert charset_size("!!!") == 33


class TestPatternEstimator:
    def test_rank_one_word_is_zero_bits(self, estimator):
        top = load_default_wordlist()[0]
        assert estimate_strength(top, estimator) == 0.0

    def test_repeat_formula_hand_computed(self, estimator):
        # "z" scores brute-force 26; eight copies multiply by the count
        assert estimator.guess_number("zzzzzzzz") == pytest.approx(26 * 8)
        assert estimate_strength("zzzzzzzz", estimator) == pytest.approx(
            math.log2(26 * 8))

    def test_repeated_word_builds_on_word_guess(self, estimator):
        rank = load_default_wordlist().index("monkey") + 1
        assert estimator.guess_number("monkeymonkey") == pytest.approx(rank * 2)

    def test_brute_force_fallback_for_random_string(self, estimator):
        # not in any dictionary, no repeats, no constant-step sequence
        assert estimate_strength("qxkvzjwmqp", estimator) == pytest.approx(
            10 * math.log2(26))

    def test_ascending_digit_sequence(self, estimator):
        # start_space 10 * step 1 * length 8
        assert estimator.guess_number("12345678") <= 10 * 1 * 8
        assert estimate_strength("23456789", estimator) == pytest.approx(
            math.log2(10 * 8))

    def test_descending_doubles_guesses(self, estimator):
        up = estimator.guess_number("cdefgh")
        down = estimator.guess_number("hgfedc")
        assert down == pytest.approx(2 * up)

    def test_capitalized_word_doubles_guesses(self, estimator):
        words = load_default_wordlist()
        rank = words.index("password") + 1
        assert estimator.guess_number("password") == rank
        assert estimator.guess_number("Password") == 2 * rank
        assert estimator.guess_number("PASSWORD") == 2 * rank

    def test_mixed_case_binomial_variants(self, estimator):
        rank = load_default_wordlist().index("password") + 1
        # U=2, L=6: sum C(8,1..2) = 8 + 28 = 36
        assert estimator.guess_number("pAsSword") == rank * 36

    def test_l33t_substitution_variants(self, estimator):
        rank = load_default_wordlist().index("password") + 1
        # one distinct substituted symbol doubles the guesses
        assert estimator.guess_number("p4ssword") == rank * 2
        # two distinct symbols quadruple
        assert estimator.guess_number("p4ssw0rd") == rank * 4

    def test_minimum_over_patterns(self, estimator):
        # "123456" is rank 1 and also a sequence; the dictionary wins
        assert estimator.guess_number("123456") == 1.0

    def test_empty_password_rejected(self, estimator):
        with pytest.raises(DomainError):
            estimate_strength("", estimator)

    def test_monotone_nondecreasing_in_dictionary_rank(self, estimator):
        # pure dictionary matches: alphabetic words of length >= 5, so
        # neither brute force nor repeat/sequence undercuts the rank
        words = [w for w in load_default_wordlist()
                 if len(w) >= 5 and w.isalpha()]
        assert len(words) > 100
        bits = [estimate_strength(w, estimator) for w in words]
        assert all(b2 >= b1 for b1, b2 in zip(bits, bits[1:]))

    @given(st.text(alphabet=st.characters(min_codepoint=33, max_codepoint=126),
                   min_size=1, max_size=16))
    @settings(max_examples=150)
    def test_estimate_is_finite_and_nonnegative(self, password):
        est = PatternEstimator()
        bits = estimate_strength(password, est)
        assert bits >= 0.0
        assert math.isfinite(bits)


class TestPrecomputed:
    def test_passthrough(self):
        est = PrecomputedStrengths({"hunter2": 12.25})
        assert estimate_strength("hunter2", est) == 12.25

    def test_fallback_for_unknown(self):
        est = PrecomputedStrengths({"hunter2": 12.25})
        assert estimate_strength("qqqqq", est) == pytest.approx(5 * math.log2(26))

    def test_custom_fallback(self):
        est = PrecomputedStrengths({}, fallback=PatternEstimator())
        assert estimate_strength("123456", est) == 0.0

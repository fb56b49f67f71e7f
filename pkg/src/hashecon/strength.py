"""Password strength estimators.

Three interchangeable estimators, all reporting strength as
log2(guess_number):

* ``PrecomputedStrengths`` replays externally computed per-password
  strengths (the authoritative path when replaying external scoring);
* ``PatternEstimator`` is a reduced pattern matcher: whole-string
  dictionary lookups with case/l33t variants, repeats, character
  sequences, and a brute-force fallback. It intentionally does not
  implement full minimal-cover scoring over substring matches, so its
  numbers are comparable to, but not bit-identical with, full
  pattern-aware scorers;
* ``BruteForceEstimator`` scores purely by charset^length.

Pattern formulas (guess numbers; the estimate is the minimum over all
matching patterns):

    dictionary   rank * case_variants * l33t_variants
    repeat       guesses(base) * repeat_count          (base repeated >= 2x)
    sequence     start_space * |step| * length * (2 if descending)
    brute force  charset_size ** length

where case_variants is 1 for all-lowercase, 2 for first-upper/all-upper/
last-upper, otherwise sum_{i=1..min(U,L)} C(U+L, i); l33t_variants is
2 ** (number of distinct substituted symbols); start_space is 10 for a
digit start, 26 for a letter, 33 otherwise; charset_size adds 26 per
letter case present, 10 for digits, 33 for anything else.
"""

from __future__ import annotations

import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Protocol

from .errors import DomainError, InputError

LOWER = 26
UPPER = 26
DIGITS = 10
SYMBOLS = 33

# symbol -> letters it commonly stands in for
L33T_TABLE = {
    "0": "o", "1": "li", "2": "z", "3": "e", "4": "a", "5": "s",
    "6": "g", "7": "t", "8": "b", "9": "g", "@": "a", "$": "s",
    "!": "i", "+": "t", "(": "c", "|": "li",
}

_MAX_SEQUENCE_STEP = 3


class StrengthEstimator(Protocol):
    def strength_bits(self, password: str) -> float: ...


def estimate_strength(password: str, estimator: StrengthEstimator) -> float:
    """log2 of the estimated guess number for ``password``."""
    if not password:
        raise DomainError("cannot estimate strength of an empty password")
    bits = estimator.strength_bits(password)
    return max(0.0, bits)


def charset_size(password: str) -> int:
    size = 0
    if any(c.islower() for c in password):
        size += LOWER
    if any(c.isupper() for c in password):
        size += UPPER
    if any(c.isdigit() for c in password):
        size += DIGITS
    if any(not c.isalnum() for c in password):
        size += SYMBOLS
    return size or SYMBOLS


class BruteForceEstimator:
    """charset_size ** length, the estimate of last resort."""

    def guess_number(self, password: str) -> float:
        return float(charset_size(password)) ** len(password)

    def strength_bits(self, password: str) -> float:
        return len(password) * math.log2(charset_size(password))


class PatternEstimator:
    """Reduced pattern-aware estimator; see module docstring for formulas."""

    def __init__(self, ranked_words: list[str] | None = None):
        if ranked_words is None:
            ranked_words = load_default_wordlist()
        self._rank = {w: i + 1 for i, w in enumerate(ranked_words)}
        self._brute = BruteForceEstimator()

    def strength_bits(self, password: str) -> float:
        return math.log2(self.guess_number(password))

    def guess_number(self, password: str) -> float:
        return self._guess(password, allow_repeat=True)

    def _guess(self, password: str, allow_repeat: bool) -> float:
        candidates = [self._brute.guess_number(password)]
        dict_guess = self._dictionary_guess(password)
        if dict_guess is not None:
            candidates.append(dict_guess)
        seq_guess = self._sequence_guess(password)
        if seq_guess is not None:
            candidates.append(seq_guess)
        if allow_repeat:
            rep_guess = self._repeat_guess(password)
            if rep_guess is not None:
                candidates.append(rep_guess)
        return max(1.0, min(candidates))

    # -- dictionary ---------------------------------------------------

    def _dictionary_guess(self, password: str) -> float | None:
        lowered = password.lower()
        rank = self._rank.get(lowered)
        l33t_variants = 1
        if rank is None:
            deleeted, n_subs = _deleet(lowered)
            if n_subs:
                rank = self._rank.get(deleeted)
                if rank is not None:
                    l33t_variants = 2 ** n_subs
        if rank is None:
            return None
        return float(rank) * _case_variants(password) * l33t_variants

    # -- repeats ------------------------------------------------------

    def _repeat_guess(self, password: str) -> float | None:
        n = len(password)
        for base_len in range(1, n // 2 + 1):
            if n % base_len:
                continue
            base = password[:base_len]
            if base * (n // base_len) == password:
                return self._guess(base, allow_repeat=False) * (n // base_len)
        return None

    # -- sequences ----------------------------------------------------

    def _sequence_guess(self, password: str) -> float | None:
        if len(password) < 3:
            return None
        codes = [ord(c) for c in password]
        step = codes[1] - codes[0]
        if step == 0 or abs(step) > _MAX_SEQUENCE_STEP:
            return None
        if any(b - a != step for a, b in zip(codes, codes[1:])):
            return None
        first = password[0]
        if first.isdigit():
            space = DIGITS
        elif first.isalpha():
            space = LOWER
        else:
            space = SYMBOLS
        guess = space * abs(step) * len(password)
        if step < 0:
            guess *= 2
        return float(guess)


class PrecomputedStrengths:
    """Passthrough of externally computed strengths; unknown passwords
    fall back to a secondary estimator (brute force by default)."""

    def __init__(self, table: dict[str, float],
                 fallback: StrengthEstimator | None = None):
        for pwd, bits in table.items():
            if bits < 0:
                raise InputError(f"negative strength for {pwd!r}")
        self._table = dict(table)
        self._fallback = fallback or BruteForceEstimator()

    def strength_bits(self, password: str) -> float:
        bits = self._table.get(password)
        if bits is None:
            return self._fallback.strength_bits(password)
        return bits


def _case_variants(password: str) -> int:
    upper = sum(1 for c in password if c.isupper())
    lower = sum(1 for c in password if c.islower())
    if upper == 0:
        return 1
    alpha = [c for c in password if c.isalpha()]
    if alpha and (alpha[0].isupper() and upper == 1):
        return 2
    if alpha and (alpha[-1].isupper() and upper == 1):
        return 2
    if lower == 0:
        return 2
    return sum(math.comb(upper + lower, i) for i in range(1, min(upper, lower) + 1))


def _deleet(password: str) -> tuple[str, int]:
    """Undo common symbol-for-letter substitutions; first letter option
    per symbol only (reduced). Returns (restored, distinct subs used)."""
    out = []
    subs = set()
    for c in password:
        repl = L33T_TABLE.get(c)
        if repl:
            out.append(repl[0])
            subs.add(c)
        else:
            out.append(c)
    return "".join(out), len(subs)


@lru_cache(maxsize=1)
def load_default_wordlist() -> list[str]:
    source = resources.files("hashecon.data") / "common_passwords.txt"
    return _parse_wordlist(source.read_text(encoding="utf-8"))


def load_wordlist(path) -> list[str]:
    return _parse_wordlist(Path(path).read_text(encoding="utf-8"))


def _parse_wordlist(text: str) -> list[str]:
    words = []
    seen = set()
    for line in text.splitlines():
        word = line.strip().lower()
        if not word or word.startswith("#"):
            continue
        if word not in seen:
            seen.add(word)
            words.append(word)
    if not words:
        raise InputError("wordlist is empty")
    return words

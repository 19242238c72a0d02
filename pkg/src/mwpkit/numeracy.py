"""Exact quantity recognition for math-word-problem text.

Every quantity is represented as an arbitrary-precision rational with an
optional pi factor, so that canonicalization, comparison and downstream
equation checks never lose precision.  The recognition grammar mirrors the
surface forms found in the common Chinese/English MWP corpora:

    integers        15
    decimals        3.5
    percents        30%   3.5%
    fractions       (3/5)  and bare  3/5
    mixed numbers   1(1/2)     = 3/2
    pi literals     pi, 2*pi, 1/2*pi (also the unicode character)

Canonical rendering (used verbatim in dedup keys and label files):
integers as-is ("15"), other rationals reduced "p/q" ("-3/4"), pi values
"<rational>*pi" ("1*pi", "1/2*pi").
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class NumberKind(Enum):
    INTEGER = "integer"
    DECIMAL = "decimal"
    FRACTION = "fraction"
    PERCENT = "percent"
    MIXED = "mixed"
    PI = "pi"


class NumberType(Enum):
    WHOLE = "whole"
    NON_INTEGER = "non_integer"


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class UnparseableAnswer(ValueError):
    """Answer string does not match any recognized number surface."""


@dataclass(frozen=True)
class ExactValue:
    """A reduced rational numerator/denominator, optionally times pi.

    ``kind`` remembers the surface form the value was read from and is
    deliberately excluded from equality: 0.5, (1/2) and 50% are the same
    value.
    """

    numerator: int
    denominator: int = 1
    pi_factor: bool = False
    kind: NumberKind | None = field(default=None, compare=False)

    def __post_init__(self):
        num, den = self.numerator, self.denominator
        if den == 0:
            raise ZeroDivisionError("ExactValue with zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num, den)
        if g > 1:
            num, den = num // g, den // g
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)
        if num == 0 and self.pi_factor:  # 0*pi is plain 0
            object.__setattr__(self, "pi_factor", False)

    @classmethod
    def from_fraction(cls, frac: Fraction, pi_factor: bool = False,
                      kind: NumberKind | None = None) -> "ExactValue":
        return cls(frac.numerator, frac.denominator, pi_factor, kind)

    def as_fraction(self) -> Fraction:
        """Rational part only; callers must consult ``pi_factor``."""
        return Fraction(self.numerator, self.denominator)

    def to_float(self) -> float:
        value = self.numerator / self.denominator
        return value * math.pi if self.pi_factor else value

    def is_integral(self) -> bool:
        return self.denominator == 1 and not self.pi_factor

    def __str__(self) -> str:
        return render(self)


ZERO = ExactValue(0)
ONE = ExactValue(1)
PI = ExactValue(1, 1, pi_factor=True, kind=NumberKind.PI)


def render(value: ExactValue) -> str:
    """Canonical, bit-exact rendering; unique per value."""
    if value.denominator == 1:
        rational = str(value.numerator)
    else:
        rational = f"{value.numerator}/{value.denominator}"
    return rational + "*pi" if value.pi_factor else rational


# Surface grammar.  Alternation order matters: the pi forms must win over
# bare fractions ("1/2*pi"), mixed numbers over their integer prefix, and
# percents over plain decimals/integers.
_PI = r"(?:(?P<pi_mult>\d+(?:/\d+)?)\*)?(?:pi|π)(?![A-Za-z])"
_MIXED = r"(?P<mx_int>\d+)\((?P<mx_num>\d+)/(?P<mx_den>\d+)\)"
_PAREN_FRACTION = r"\((?P<pf_num>\d+)/(?P<pf_den>\d+)\)"
_BARE_FRACTION = r"(?P<bf_num>\d+)/(?P<bf_den>\d+)"
_PERCENT = r"(?P<pc>\d+(?:\.\d+)?)%"
_DECIMAL = r"(?P<dec>\d+\.\d+)"
_INTEGER = r"(?P<int>\d+)"

_TEXT_ALTS = [_PI, _MIXED, _PAREN_FRACTION, _BARE_FRACTION, _PERCENT,
              _DECIMAL, _INTEGER]
# Equations treat bare a/b as division (dataset convention); fractions there
# are always parenthesized or part of a mixed number.
_EQUATION_ALTS = [_PI, _MIXED, _PAREN_FRACTION, _PERCENT, _DECIMAL, _INTEGER]

TEXT_NUMBER_RE = re.compile("|".join(f"(?:{a})" for a in _TEXT_ALTS))
EQUATION_NUMBER_RE = re.compile("|".join(f"(?:{a})" for a in _EQUATION_ALTS))

_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
)


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def _value_from_match(m: re.Match) -> ExactValue:
    g = m.groupdict()
    if g.get("int") is not None:
        return ExactValue(int(g["int"]), kind=NumberKind.INTEGER)
    if g.get("dec") is not None:
        return ExactValue.from_fraction(Fraction(g["dec"]),
                                        kind=NumberKind.DECIMAL)
    if g.get("pc") is not None:
        return ExactValue.from_fraction(Fraction(g["pc"]) / 100,
                                        kind=NumberKind.PERCENT)
    if g.get("bf_num") is not None:
        return ExactValue(int(g["bf_num"]), int(g["bf_den"]),
                          kind=NumberKind.FRACTION)
    if g.get("pf_num") is not None:
        return ExactValue(int(g["pf_num"]), int(g["pf_den"]),
                          kind=NumberKind.FRACTION)
    if g.get("mx_int") is not None:
        whole = int(g["mx_int"])
        frac = Fraction(int(g["mx_num"]), int(g["mx_den"]))
        return ExactValue.from_fraction(whole + frac, kind=NumberKind.MIXED)
    # pi alternative matched; the multiplier group may be absent ("pi").
    mult = Fraction(g["pi_mult"]) if g.get("pi_mult") else Fraction(1)
    return ExactValue.from_fraction(mult, pi_factor=True, kind=NumberKind.PI)


def parse_surface(surface: str, grammar: re.Pattern = TEXT_NUMBER_RE) -> ExactValue:
    """Parse a string that is exactly one number surface."""
    m = grammar.fullmatch(surface)
    if m is None:
        raise UnparseableAnswer(f"not a number surface: {surface!r}")
    return _value_from_match(m)


@dataclass(frozen=True)
class NumberToken:
    position: int  # token index in the problem token sequence
    surface: str
    value: ExactValue
    kind: NumberKind


def tokenize_text(text: str) -> list[str]:
    """Default problem-text tokenizer.

    One token per maximal number surface, per CJK codepoint, per maximal run
    of Latin letters, and per remaining (punctuation) character; whitespace
    separates tokens and is dropped.
    """
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = TEXT_NUMBER_RE.match(text, i)
        if m is not None:
            tokens.append(m.group())
            i = m.end()
            continue
        if _is_cjk(ch):
            tokens.append(ch)
            i += 1
            continue
        if ch.isascii() and ch.isalpha():
            j = i + 1
            while j < n and text[j].isascii() and text[j].isalpha():
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        tokens.append(ch)
        i += 1
    return tokens


def recognize_numbers(tokens: list[str]) -> list[NumberToken]:
    """All quantities in a token sequence, left to right."""
    found = []
    for position, token in enumerate(tokens):
        m = TEXT_NUMBER_RE.fullmatch(token)
        if m is not None:
            value = _value_from_match(m)
            found.append(NumberToken(position, token, value, value.kind))
    return found


def number_type(token: NumberToken) -> NumberType:
    """Surface-form typing: only plain integer surfaces count as whole."""
    if token.kind is NumberKind.INTEGER:
        return NumberType.WHOLE
    return NumberType.NON_INTEGER


def parse_answer(answer: str) -> ExactValue:
    """Parse an answer string (any recognized surface, optional sign)."""
    s = answer.strip()
    negative = False
    if s.startswith(("-", "+")):
        negative = s[0] == "-"
        s = s[1:].strip()
    value = parse_surface(s)
    if negative:
        return ExactValue(-value.numerator, value.denominator,
                          value.pi_factor, value.kind)
    return value


def compare_magnitude(a: ExactValue, b: ExactValue) -> Ordering:
    """Trichotomy; exact cross-multiplication unless pi is involved."""
    if not a.pi_factor and not b.pi_factor:
        diff = a.numerator * b.denominator - b.numerator * a.denominator
    else:
        fa, fb = a.to_float(), b.to_float()
        diff = (fa > fb) - (fa < fb)
    if diff < 0:
        return Ordering.LESS
    if diff > 0:
        return Ordering.GREATER
    return Ordering.EQUAL

"""Bates number grammar and arithmetic.

A Bates endorsement is an uppercase letter prefix, an optional single
separator character, and a zero-padded digit block whose written length
defines the number's width. "ABC0000123" has width 7 and value 123;
"ABC123" has width 3 and the same value. The two compare equal
numerically but not as strings, and string equality is what production
QC checks, so width is part of the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidFormat, Overflow

UPPERCASE = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

#: Legal separator values. "" means no separator.
SEPARATORS = ("", "-", "_", " ")


@dataclass(frozen=True)
class BatesGrammar:
    """Configurable grammar for parsing endorsement strings."""

    prefix_alphabet: str = UPPERCASE
    separators: tuple[str, ...] = SEPARATORS


DEFAULT_GRAMMAR = BatesGrammar()


@dataclass(frozen=True)
class BatesNumber:
    prefix: str
    separator: str
    value: int
    width: int

    def __post_init__(self):
        if not self.prefix or not all(c in UPPERCASE for c in self.prefix):
            raise InvalidFormat(f"prefix must be non-empty uppercase letters, got {self.prefix!r}")
        if self.separator not in SEPARATORS:
            raise InvalidFormat(f"separator must be one of {SEPARATORS}, got {self.separator!r}")
        if self.width < 1:
            raise InvalidFormat(f"width must be >= 1, got {self.width}")
        if not 0 <= self.value < 10 ** self.width:
            raise InvalidFormat(
                f"value {self.value} does not fit in width {self.width}"
            )

    def render(self) -> str:
        return self.prefix + self.separator + str(self.value).zfill(self.width)

    def __str__(self) -> str:
        return self.render()


def parse_bates(text: str, grammar: BatesGrammar = DEFAULT_GRAMMAR) -> BatesNumber:
    """Decompose a canonical endorsement string into a BatesNumber.

    The whole string must match PREFIX[SEP]DIGITS. Leading zeros are
    preserved: the digit count as written becomes the width.

    Raises InvalidFormat if there is no prefix, no digit block, or any
    character outside the grammar.
    """
    if not text:
        raise InvalidFormat("empty string")
    i = 0
    while i < len(text) and text[i] in grammar.prefix_alphabet:
        i += 1
    if i == 0:
        raise InvalidFormat(f"no prefix at start of {text!r}")
    prefix = text[:i]
    rest = text[i:]
    separator = ""
    if rest and not rest[0].isdigit():
        if rest[0] in grammar.separators:
            separator = rest[0]
            rest = rest[1:]
        else:
            raise InvalidFormat(f"illegal separator {rest[0]!r} in {text!r}")
    if not rest or not re.fullmatch(r"[0-9]+", rest):
        raise InvalidFormat(f"no digit block after prefix in {text!r}")
    return BatesNumber(prefix=prefix, separator=separator, value=int(rest), width=len(rest))


def render_bates(b: BatesNumber) -> str:
    """Render back to the canonical fixed-width string."""
    return b.render()


def successor(b: BatesNumber) -> BatesNumber:
    """The next number in the sequence, same prefix, separator and width.

    Width is fixed for a production; rolling past all-nines raises
    Overflow rather than silently widening the digit block.
    """
    if b.value + 1 >= 10 ** b.width:
        raise Overflow(f"{b.render()} is the last value at width {b.width}")
    return BatesNumber(b.prefix, b.separator, b.value + 1, b.width)

"""Deterministic, locale-fixed parsing of numeric surface forms.

Online articles write the same number many ways ("3,700,000", "3.7 million",
"3.7M"). Everything downstream (validation, merging, chart axes) depends on
collapsing those styles into one canonical (value, unit) pair, so this module
is pure and total over its grammar: no LLM, no locale, no floats.
"""

from __future__ import annotations

import re
from decimal import Decimal
from typing import Optional

__all__ = [
    "NotAQuantity",
    "normalize_quantity",
    "quantity_magnitude",
    "align_to_scale",
    "find_quantities",
    "QuantityToken",
    "SCALE_MULTIPLIERS",
    "is_year",
    "display_quantity",
]


class NotAQuantity(ValueError):
    """Raised when a token does not match the numeric grammar."""


SCALE_MULTIPLIERS = {
    "": Decimal(1),
    "thousand": Decimal(10) ** 3,
    "million": Decimal(10) ** 6,
    "billion": Decimal(10) ** 9,
    "trillion": Decimal(10) ** 12,
}

_LETTER_SCALES = {"k": "thousand", "m": "million", "b": "billion"}

_CURRENCY_SYMBOLS = "$€£"

# sign, digits with optional thousands separators, optional decimal part,
# optional scale suffix, optional % / measure word tail
_TOKEN_RE = re.compile(
    r"""^\s*
    (?P<cur_a>[{cur}])?\s*
    (?P<sign>[-+−])?\s*
    (?P<cur_b>[{cur}])?\s*
    (?P<number>\d{{1,3}}(?:,\d{{3}})+(?:\.\d+)?|\d+(?:\.\d+)?|\.\d+)
    (?:\s*(?P<scale>thousand|million|billion|trillion|[KkMB](?![A-Za-z])))?
    (?:\s*(?P<tail>%|percent|per\ cent|[A-Za-z][A-Za-z]*))?
    \s*$""".format(cur=_CURRENCY_SYMBOLS),
    re.IGNORECASE | re.VERBOSE,
)


def _plain(value: Decimal) -> Decimal:
    """Normalize without drifting into exponent form: 850000, not 8.5E+5."""
    value = value.normalize()
    if value.as_tuple().exponent > 0:
        value = value.quantize(Decimal(1))
    return value


def _canonical_scale(raw: Optional[str]) -> str:
    if not raw:
        return ""
    low = raw.lower()
    if low in SCALE_MULTIPLIERS:
        return low
    return _LETTER_SCALES[low]


def _canonical_tail(raw: Optional[str]) -> str:
    if not raw:
        return ""
    low = raw.lower()
    if low in ("%", "percent", "per cent"):
        return "%"
    return low


def normalize_quantity(text_token: str, align_to: Optional[str] = None) -> tuple[Decimal, str]:
    """Parse one numeric token into a canonical (value, unit) pair.

    The unit keeps whatever the surface form said: "3.7 million" stays
    (3.7, "million"), "23.1%" becomes (23.1, "%"), "$2.5 billion" becomes
    (2.5, "$ billion"). Pure digit forms of a million or more are folded onto
    the nearest scale word so that "3,000,000" and "3 million" normalize
    identically. Pass ``align_to`` (a scale word, or "" for raw magnitude)
    when surrounding values force a shared scale: "850,000" aligned to
    "million" yields (0.85, "million").

    Raises NotAQuantity for tokens outside the grammar.
    """
    if not isinstance(text_token, str):
        raise NotAQuantity(f"not a string: {text_token!r}")
    m = _TOKEN_RE.match(text_token)
    if m is None:
        raise NotAQuantity(f"unparseable numeric token: {text_token!r}")
    if m.group("cur_a") and m.group("cur_b"):
        raise NotAQuantity(f"doubled currency symbol: {text_token!r}")

    digits = m.group("number").replace(",", "")
    value = Decimal(digits)
    if m.group("sign") in ("-", "−"):
        value = -value

    scale = _canonical_scale(m.group("scale"))
    tail = _canonical_tail(m.group("tail"))
    currency = m.group("cur_a") or m.group("cur_b") or ""

    if tail in SCALE_MULTIPLIERS and tail and not scale:
        # "3.7 million" with an extra space pattern lands in tail
        scale, tail = tail, ""

    # pure digit forms >= 10^6 fold onto the nearest scale word for merging
    if not scale and tail != "%":
        magnitude = abs(value)
        for word in ("trillion", "billion", "million"):
            if magnitude >= SCALE_MULTIPLIERS[word]:
                value = value / SCALE_MULTIPLIERS[word]
                scale = word
                break

    if align_to is not None:
        if align_to not in SCALE_MULTIPLIERS:
            raise ValueError(f"unknown scale word: {align_to!r}")
        value = value * SCALE_MULTIPLIERS[scale] / SCALE_MULTIPLIERS[align_to]
        scale = align_to

    parts = [p for p in (currency, scale, tail) if p]
    return _plain(value), " ".join(parts)


def quantity_magnitude(value: Decimal, unit: str) -> Decimal:
    """Absolute magnitude of a parsed quantity: value times its scale word."""
    for word, mult in SCALE_MULTIPLIERS.items():
        if word and word in unit.split():
            return value * mult
    return Decimal(value)


def align_to_scale(value: Decimal, unit: str, scale: str) -> tuple[Decimal, str]:
    """Re-express a count quantity in another scale word, keeping the unit tail."""
    if scale not in SCALE_MULTIPLIERS:
        raise ValueError(f"unknown scale word: {scale!r}")
    parts = unit.split()
    current = ""
    rest = []
    for p in parts:
        if p in SCALE_MULTIPLIERS and not current:
            current = p
        else:
            rest.append(p)
    new_value = _plain(value * SCALE_MULTIPLIERS[current or ""] / SCALE_MULTIPLIERS[scale])
    new_parts = [p for p in rest if p in _CURRENCY_SYMBOLS]
    tail = [p for p in rest if p not in _CURRENCY_SYMBOLS]
    unit_out = " ".join(new_parts + ([scale] if scale else []) + tail)
    return new_value, unit_out


def display_quantity(value: Decimal, unit: str) -> str:
    """Human-readable surface form: (3.7, "million") -> "3.7 million"."""
    from ..model import format_decimal

    text = format_decimal(value)
    if "." not in text and abs(value) >= 10_000:
        text = f"{int(value):,}"
    if not unit:
        return text
    if unit == "%" or unit.startswith("%"):
        return f"{text}%"
    if unit[0] in _CURRENCY_SYMBOLS:
        rest = unit[1:].strip()
        return f"{unit[0]}{text} {rest}".rstrip()
    return f"{text} {unit}"


_YEAR_RE = re.compile(r"^(19|20)\d{2}$")


def is_year(token: str) -> bool:
    """True for bare four-digit years 1900-2099 (no separators, no suffix)."""
    return bool(_YEAR_RE.match(token.strip()))


class QuantityToken:
    """A numeric token located in running text."""

    __slots__ = ("text", "start", "end", "value", "unit", "year")

    def __init__(self, text: str, start: int, end: int, value: Decimal, unit: str, year: bool):
        self.text = text
        self.start = start
        self.end = end
        self.value = value
        self.unit = unit
        self.year = year

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        kind = "year" if self.year else "qty"
        return f"QuantityToken({self.text!r}, {self.value}, {self.unit!r}, {kind})"


_SCAN_RE = re.compile(
    r"""(?P<cur>[$€£]\s*)?
    (?P<num>\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?)
    (?P<scale>\s*(?:thousand|million|billion|trillion)\b|[KkMB](?![A-Za-z]))?
    (?P<pct>\s*(?:%|percent\b|per\ cent\b))?""",
    re.IGNORECASE | re.VERBOSE,
)


def find_quantities(text: str) -> list[QuantityToken]:
    """Scan text for numeric tokens, classifying bare 1900-2099 integers as years.

    Context words are left alone: only the number plus any attached scale
    word, percent marker, or currency symbol belongs to the token.
    """
    out: list[QuantityToken] = []
    for m in _SCAN_RE.finditer(text):
        raw = m.group(0).strip()
        num = m.group("num")
        if is_year(num) and not m.group("scale") and not m.group("pct") and not m.group("cur"):
            out.append(QuantityToken(raw, m.start(), m.end(), Decimal(num), "", True))
            continue
        try:
            value, unit = normalize_quantity(raw)
        except NotAQuantity:
            continue
        out.append(QuantityToken(raw, m.start(), m.end(), value, unit, False))
    return out

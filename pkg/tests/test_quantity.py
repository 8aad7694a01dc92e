"""Quantity normalizer: exact corpus of surface styles plus round-trip property."""

import time
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factweave.extraction.quantity import (
    NotAQuantity,
    QuantityToken,
    SCALE_MULTIPLIERS,
    align_to_scale,
    find_quantities,
    is_year,
    normalize_quantity,
    quantity_magnitude,
)

D = Decimal

# 60 surface forms covering separators, scale suffixes, percent, currency,
# signs, and the canonicalization of pure digit forms >= 10^6.
CORPUS = [
    ("3,700,000", D("3.7"), "million"),
    ("3.7 million", D("3.7"), "million"),
    ("3.7M", D("3.7"), "million"),
    ("3,000,000", D("3"), "million"),
    ("3 million", D("3"), "million"),
    ("23.1%", D("23.1"), "%"),
    ("15.6%", D("15.6"), "%"),
    ("0", D("0"), ""),
    ("850,000", D("850000"), ""),
    ("2.5 million", D("2.5"), "million"),
    ("1,000,000", D("1"), "million"),
    ("999,999", D("999999"), ""),
    ("1000000", D("1"), "million"),
    ("united", None, None),
    ("7,500", D("7500"), ""),
    ("7.5K", D("7.5"), "thousand"),
    ("7.5k", D("7.5"), "thousand"),
    ("7.5 thousand", D("7.5"), "thousand"),
    ("2.5B", D("2.5"), "billion"),
    ("2.5 billion", D("2.5"), "billion"),
    ("2,500,000,000", D("2.5"), "billion"),
    ("1.2 trillion", D("1.2"), "trillion"),
    ("1,200,000,000,000", D("1.2"), "trillion"),
    ("57%", D("57"), "%"),
    ("57 percent", D("57"), "%"),
    ("57 per cent", D("57"), "%"),
    ("0.5%", D("0.5"), "%"),
    (".5%", D("0.5"), "%"),
    ("100%", D("100"), "%"),
    ("-4.2%", D("-4.2"), "%"),
    ("+4.2%", D("4.2"), "%"),
    ("−1.5%", D("-1.5"), "%"),
    ("$2.5 billion", D("2.5"), "$ billion"),
    ("$100", D("100"), "$"),
    ("$3,000,000", D("3"), "$ million"),
    ("€45 million", D("45"), "€ million"),
    ("£12,000", D("12000"), "£"),
    ("-$5 million", D("-5"), "$ million"),
    ("2024", D("2024"), ""),
    ("12", D("12"), ""),
    ("12 years", D("12"), "years"),
    ("180 days", D("180"), "days"),
    ("65 mph", D("65"), "mph"),
    ("98.6 degrees", D("98.6"), "degrees"),
    ("3.7 million children", D("3.7"), "million children"),
    ("20%", D("20"), "%"),
    ("1,234.56", D("1234.56"), ""),
    ("0.001", D("0.001"), ""),
    ("41", D("41"), ""),
    ("106", D("106"), ""),
    ("4,000,000,000", D("4"), "billion"),
    ("9,900,000", D("9.9"), "million"),
    ("1500000", D("1.5"), "million"),
    ("250K", D("250"), "thousand"),
    ("3.14159", D("3.14159"), ""),
    ("hello", None, None),
    ("3..7", None, None),
    ("", None, None),
    ("12,34", None, None),
    ("70%", D("70"), "%"),
]


def test_corpus_is_sixty_cases():
    assert len(CORPUS) == 60


@pytest.mark.parametrize("token,value,unit", CORPUS, ids=[c[0] or "<empty>" for c in CORPUS])
def test_corpus_exact(token, value, unit):
    if value is None:
        with pytest.raises(NotAQuantity):
            normalize_quantity(token)
    else:
        got_value, got_unit = normalize_quantity(token)
        assert got_value == value
        assert got_unit == unit


def test_corpus_runtime_under_one_second():
    start = time.perf_counter()
    for _ in range(10):
        for token, value, _ in CORPUS:
            if value is None:
                continue
            normalize_quantity(token)
    assert time.perf_counter() - start < 1.0


def test_alignment_modes():
    # the mixed-scale pair that forces alignment: 850,000 next to 2.5 million
    assert normalize_quantity("850,000", align_to="million") == (D("0.85"), "million")
    assert normalize_quantity("850,000") == (D("850000"), "")
    assert normalize_quantity("2.5 million", align_to="million") == (D("2.5"), "million")
    assert normalize_quantity("3.7 million", align_to="") == (D("3700000"), "")
    assert align_to_scale(D("850000"), "", "million") == (D("0.85"), "million")
    assert align_to_scale(D("2.5"), "billion", "million") == (D("2500"), "million")
    assert align_to_scale(D("2.5"), "$ billion", "million") == (D("2500"), "$ million")


def test_magnitude_helper():
    assert quantity_magnitude(D("3.7"), "million") == D("3700000")
    assert quantity_magnitude(D("23.1"), "%") == D("23.1")
    assert quantity_magnitude(D("2.5"), "$ billion") == D("2500000000")


def test_is_year():
    assert is_year("2024")
    assert is_year("1999")
    assert not is_year("2100")
    assert not is_year("850")
    assert not is_year("20245")


def test_find_quantities_classifies_years():
    text = "From 1999 to 2020, enrollment grew from 850,000 students to 2.5 million students."
    tokens = find_quantities(text)
    assert [(t.text, t.year) for t in tokens] == [
        ("1999", True),
        ("2020", True),
        ("850,000", False),
        ("2.5 million", False),
    ]
    assert tokens[2].value == D("850000")
    assert tokens[3].value == D("2.5")
    assert tokens[3].unit == "million"


def test_find_quantities_percent_and_currency():
    tokens = find_quantities("Revenue hit $4.6 billion, up 23.1% since 2021.")
    kinds = [(t.value, t.unit, t.year) for t in tokens]
    assert (D("4.6"), "$ billion", False) in kinds
    assert (D("23.1"), "%", False) in kinds
    assert (D("2021"), "", True) in kinds


# --- round-trip property -----------------------------------------------------
#
# Oracle: a generated surface form carries its own known magnitude
# (digits x scale); the parse must preserve it to within 1e-9 relative.

_scales = st.sampled_from(["", "thousand", "million", "billion", "trillion", "K", "M", "B"])


@st.composite
def numeric_surface(draw):
    whole = draw(st.integers(min_value=0, max_value=10**9))
    frac_digits = draw(st.integers(min_value=0, max_value=4))
    frac = draw(st.integers(min_value=0, max_value=10**frac_digits - 1)) if frac_digits else 0
    scale = draw(_scales)
    use_commas = scale == "" and frac_digits == 0 and draw(st.booleans())
    pct = scale == "" and draw(st.booleans())

    value = Decimal(whole)
    if frac_digits:
        value += Decimal(frac) / (10**frac_digits)
    if use_commas:
        text = f"{whole:,}"
    else:
        text = str(whole) + (f".{frac:0{frac_digits}d}" if frac_digits else "")
    if scale in ("K", "M", "B"):
        text += scale
        mult = {"K": 10**3, "M": 10**6, "B": 10**9}[scale]
    elif scale:
        text += " " + scale
        mult = int(SCALE_MULTIPLIERS[scale])
    else:
        mult = 1
    if pct:
        text += "%"
    return text, value * mult, pct


@settings(max_examples=10_000, deadline=None)
@given(numeric_surface())
def test_roundtrip_magnitude_within_tolerance(case):
    text, magnitude, pct = case
    value, unit = normalize_quantity(text)
    got = quantity_magnitude(value, unit)
    assert abs(got - magnitude) <= Decimal("1e-9") * max(1, abs(magnitude))
    if pct:
        assert unit == "%"


@settings(max_examples=200, deadline=None)
@given(numeric_surface(), st.sampled_from(["", "thousand", "million", "billion", "trillion"]))
def test_alignment_preserves_magnitude(case, target):
    text, magnitude, pct = case
    if pct:
        return
    value, unit = normalize_quantity(text, align_to=target)
    assert quantity_magnitude(value, unit) == magnitude


def test_normalize_is_pure():
    assert normalize_quantity("3.7 million") == normalize_quantity("3.7 million")
    token = find_quantities("3.7 million")[0]
    assert isinstance(token, QuantityToken)

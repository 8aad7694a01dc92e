"""Quantity normalization walkthrough.

Articles write the same number a dozen ways. The normalizer folds surface
styles onto one canonical (value, unit) pair so downstream validation and
merging can compare magnitudes exactly.
"""

from decimal import Decimal

from factweave.extraction.quantity import (
    align_to_scale,
    display_quantity,
    find_quantities,
    normalize_quantity,
    quantity_magnitude,
)

print("Same number, three spellings:")
for token in ("3,700,000", "3.7 million", "3.7M"):
    value, unit = normalize_quantity(token)
    print(f"  {token!r:14} -> ({value}, {unit!r})")

print("\nPercent, currency, and plain counts:")
for token in ("23.1%", "$2.5 billion", "850,000", "57 percent"):
    value, unit = normalize_quantity(token)
    print(f"  {token!r:14} -> ({value}, {unit!r})  magnitude={quantity_magnitude(value, unit)}")

print("\nScale alignment for mixed pairs (850,000 students vs 2.5 million students):")
value, unit = normalize_quantity("850,000", align_to="million")
print(f"  850,000 aligned to millions -> ({value}, {unit!r})")
print(f"  align_to_scale(2.5 billion -> million) = {align_to_scale(Decimal('2.5'), 'billion', 'million')}")

sentence = "From 1999 to 2020, enrollment grew from 850,000 students to 2.5 million students."
print(f"\nScanning a sentence:\n  {sentence}")
for t in find_quantities(sentence):
    kind = "year" if t.year else "quantity"
    print(f"  [{kind:8}] {t.text!r:14} value={t.value} unit={t.unit!r}")

print("\nDisplay forms:", display_quantity(Decimal("0.85"), "million"), "/", display_quantity(Decimal("600000"), ""))

"""Chart-kind guard rules shared by recommendation and document validation.

The chart menu has six kinds; an LLM picks one per narrative and these rules
veto picks the data cannot support, falling back bar -> isotype -> text.
"""

from __future__ import annotations

from .model import DataPoint
from .organization.merging import key_is_ordinal, unit_family

__all__ = ["kind_is_valid", "fallback_kind", "orderable_key"]


def orderable_key(key: str) -> bool:
    return key_is_ordinal(key)


def _keys(points: list[DataPoint]) -> list[str]:
    return [p.series_key if p.series_key else p.label for p in points]


def kind_is_valid(kind: str, points: list[DataPoint]) -> bool:
    if not points:
        return kind == "text"
    if kind == "text":
        return True
    if kind == "bar":
        return len(points) >= 2
    if kind == "pie":
        return len(points) >= 2 and all(p.value >= 0 for p in points)
    if kind == "line":
        keys = _keys(points)
        return (
            len(points) >= 2
            and all(orderable_key(k) for k in keys)
            and len(set(keys)) >= 2
        )
    if kind == "isotype":
        return all(unit_family(p.unit) == "%" for p in points)
    if kind == "range":
        if len(points) < 2 or len(points) % 2 != 0:
            return False
        groups: dict[str, int] = {}
        for k in _keys(points):
            groups[k] = groups.get(k, 0) + 1
        return all(n == 2 for n in groups.values())
    return False


def fallback_kind(points: list[DataPoint]) -> str:
    """Deterministic floor when the recommended kind is impossible."""
    if len(points) >= 2:
        return "bar"
    if len(points) == 1 and unit_family(points[0].unit) == "%":
        return "isotype"
    return "text"

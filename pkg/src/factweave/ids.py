"""Sequential, content-independent identifiers ("a1", "f17", "c3", ...).

Ids are assigned in processing order so that seeded mock runs serialize
byte-identically. Sorting helpers compare the numeric suffix, not the string,
so "f2" < "f10".
"""

from __future__ import annotations

import re
from collections import defaultdict

_ID_RE = re.compile(r"^([a-z]+)(\d+)$")


class IdAllocator:
    """Hands out per-prefix sequential ids starting at 1."""

    def __init__(self) -> None:
        self._counters: dict[str, int] = defaultdict(int)

    def next(self, prefix: str) -> str:
        self._counters[prefix] += 1
        return f"{prefix}{self._counters[prefix]}"


def id_number(identifier: str) -> int:
    """Numeric suffix of an id; raises ValueError on malformed ids."""
    m = _ID_RE.match(identifier)
    if not m:
        raise ValueError(f"malformed id: {identifier!r}")
    return int(m.group(2))


def id_sort_key(identifier: str) -> tuple[str, int]:
    m = _ID_RE.match(identifier)
    if not m:
        return (identifier, 0)
    return (m.group(1), int(m.group(2)))

"""Caption rich-text handling.

Captions come back from an LLM as HTML, which is an injection surface, so
everything is squeezed through a whitelist: ``span`` (class attribute only),
``b``, and ``i``. Highlight spans use ``class="hl-N"`` where N is the color
index shared with the chart series.
"""

from __future__ import annotations

import re
from decimal import Decimal
from html import escape
from html.parser import HTMLParser
from typing import Optional

ALLOWED_TAGS = ("span", "b", "i")

_HL_CLASS_RE = re.compile(r"^hl-(\d+)$")


class _Sanitizer(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.out: list[str] = []
        self._open: list[str] = []

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag not in ALLOWED_TAGS:
            return
        kept = ""
        if tag == "span":
            for name, value in attrs:
                if name == "class" and value and _HL_CLASS_RE.match(value.strip()):
                    kept = f' class="{value.strip()}"'
                    break
        self.out.append(f"<{tag}{kept}>")
        self._open.append(tag)

    def handle_endtag(self, tag: str) -> None:
        if tag in ALLOWED_TAGS and tag in self._open:
            # close any tags opened after it, then the tag itself
            while self._open:
                top = self._open.pop()
                self.out.append(f"</{top}>")
                if top == tag:
                    break

    def handle_data(self, data: str) -> None:
        self.out.append(escape(data, quote=False))

    def result(self) -> str:
        while self._open:
            self.out.append(f"</{self._open.pop()}>")
        return "".join(self.out)


def sanitize_caption(html: str) -> str:
    """Strip everything but span-with-class/b/i; escapes stray text."""
    s = _Sanitizer()
    s.feed(html)
    s.close()
    return s.result()


class Highlight:
    """One highlight span: its color index and the text inside it."""

    __slots__ = ("color_index", "text")

    def __init__(self, color_index: int, text: str):
        self.color_index = color_index
        self.text = text

    def __repr__(self) -> str:  # pragma: no cover
        return f"Highlight({self.color_index}, {self.text!r})"


class _HighlightCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.highlights: list[Highlight] = []
        self._active: Optional[Highlight] = None
        self._depth = 0

    def handle_starttag(self, tag: str, attrs) -> None:
        if self._active is not None:
            self._depth += 1
            return
        if tag != "span":
            return
        for name, value in attrs:
            if name == "class" and value:
                m = _HL_CLASS_RE.match(value.strip())
                if m:
                    self._active = Highlight(int(m.group(1)), "")
                    self._depth = 0
                    return

    def handle_endtag(self, tag: str) -> None:
        if self._active is None:
            return
        if self._depth > 0:
            self._depth -= 1
            return
        if tag == "span":
            self.highlights.append(self._active)
            self._active = None

    def handle_data(self, data: str) -> None:
        if self._active is not None:
            self._active.text += data


def extract_highlights(caption_html: str) -> list[Highlight]:
    """All hl-N spans in document order."""
    c = _HighlightCollector()
    c.feed(caption_html)
    c.close()
    return c.highlights


def highlight_span(color_index: int, text: str) -> str:
    return f'<span class="hl-{color_index}">{escape(text, quote=False)}</span>'


def plain_text(caption_html: str) -> str:
    """Caption with all markup removed."""

    class _Text(HTMLParser):
        def __init__(self) -> None:
            super().__init__(convert_charrefs=True)
            self.buf: list[str] = []

        def handle_data(self, data: str) -> None:
            self.buf.append(data)

    t = _Text()
    t.feed(caption_html)
    t.close()
    return "".join(t.buf)


def highlight_matches_value(text: str, value: Decimal, unit: str) -> bool:
    """Whether a highlight's text denotes the given data point value.

    Comparison is by magnitude (value times scale) so "3,700,000" inside a
    caption matches a stored (3.7, "million") point.
    """
    from .extraction.quantity import NotAQuantity, normalize_quantity, quantity_magnitude

    try:
        got_value, got_unit = normalize_quantity(text.strip())
    except NotAQuantity:
        return False
    expected = quantity_magnitude(value, unit)
    got = quantity_magnitude(got_value, got_unit)
    if abs(got - expected) > Decimal("1e-9") * max(Decimal(1), abs(expected)):
        return False
    return ("%" in unit) == ("%" in got_unit)

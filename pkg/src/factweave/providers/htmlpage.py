"""HTML to ordered text blocks, plus lightweight metadata scraping.

No boilerplate judgment happens here — paragraph filtering is an extraction
concern. This only splits visible body text on block boundaries and pulls
the title and a publication year when the page offers one.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Optional

_BLOCK_TAGS = {"p", "li", "h1", "h2", "h3", "h4", "blockquote"}
_SKIP_TAGS = {"script", "style", "noscript", "template"}

_YEAR_RE = re.compile(r"\b(19|20)\d{2}\b")


class _PageParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[str] = []
        self.title: str = ""
        self.meta_year: Optional[int] = None
        self._block_depth = 0
        self._skip_depth = 0
        self._in_title = False
        self._buf: list[str] = []

    def handle_starttag(self, tag: str, attrs) -> None:
        attrs = dict(attrs)
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag == "meta" and self.meta_year is None:
            key = (attrs.get("property") or attrs.get("name") or "").lower()
            if key in ("article:published_time", "date", "article:modified_time", "og:updated_time"):
                m = _YEAR_RE.search(attrs.get("content") or "")
                if m:
                    self.meta_year = int(m.group(0))
        elif tag == "time" and self.meta_year is None:
            m = _YEAR_RE.search(attrs.get("datetime") or "")
            if m:
                self.meta_year = int(m.group(0))
        elif tag in _BLOCK_TAGS:
            if self._block_depth == 0:
                self._buf = []
            self._block_depth += 1

    def handle_endtag(self, tag: str) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag == "title":
            self._in_title = False
        elif tag in _BLOCK_TAGS and self._block_depth > 0:
            self._block_depth -= 1
            if self._block_depth == 0:
                text = " ".join("".join(self._buf).split())
                if text:
                    self.blocks.append(text)
                self._buf = []

    def handle_data(self, data: str) -> None:
        if self._skip_depth:
            return
        if self._in_title:
            self.title += data
        elif self._block_depth > 0:
            self._buf.append(data)


def parse_page(html: str) -> tuple[list[str], dict]:
    """(paragraphs, metadata) where metadata has title and published_year (0 unknown)."""
    parser = _PageParser()
    parser.feed(html)
    parser.close()
    return parser.blocks, {
        "title": " ".join(parser.title.split()),
        "published_year": parser.meta_year or 0,
    }

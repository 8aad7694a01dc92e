from decimal import Decimal

from factweave.captions import (
    extract_highlights,
    highlight_matches_value,
    highlight_span,
    plain_text,
    sanitize_caption,
)


def test_sanitize_strips_disallowed_tags():
    dirty = '<script>alert(1)</script><p>Hello <b>3.7 million</b> <a href="x">link</a></p>'
    assert sanitize_caption(dirty) == "alert(1)Hello <b>3.7 million</b> link"


def test_sanitize_keeps_highlight_spans_only_with_hl_class():
    html = '<span class="hl-0">23.1%</span> vs <span class="evil" onclick="x()">15.6%</span>'
    assert sanitize_caption(html) == '<span class="hl-0">23.1%</span> vs <span>15.6%</span>'


def test_sanitize_idempotent():
    html = '<span class="hl-1">3.7 million</span> children, <i>per 2024 data</i>'
    once = sanitize_caption(html)
    assert sanitize_caption(once) == once


def test_extract_highlights_order_and_color():
    html = 'Only <span class="hl-0">23.1%</span> cited needs while <span class="hl-1">15.6%</span> cited health.'
    hs = extract_highlights(html)
    assert [(h.color_index, h.text) for h in hs] == [(0, "23.1%"), (1, "15.6%")]


def test_highlight_matching_by_magnitude():
    assert highlight_matches_value("3.7 million", Decimal("3.7"), "million")
    assert highlight_matches_value("3,700,000", Decimal("3.7"), "million")
    assert highlight_matches_value("23.1%", Decimal("23.1"), "%")
    assert not highlight_matches_value("23.1%", Decimal("23.1"), "million")
    assert not highlight_matches_value("3.1 million", Decimal("3.7"), "million")
    assert not highlight_matches_value("several", Decimal("3.7"), "million")


def test_plain_text_and_span_builder():
    span = highlight_span(2, "3.7 million")
    assert span == '<span class="hl-2">3.7 million</span>'
    assert plain_text(f"Growth hit {span}.") == "Growth hit 3.7 million."

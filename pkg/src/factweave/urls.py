"""URL normalization used for article deduplication."""

from __future__ import annotations

from urllib.parse import parse_qsl, urlencode, urlsplit

_TRACKING_PREFIXES = ("utm_",)
_TRACKING_KEYS = {"fbclid", "gclid"}


def normalize_url(url: str) -> str:
    """Dedup key for a URL: scheme and www stripped, tracking params dropped.

    "https://www.example.com/a/?utm_source=x" and "http://example.com/a"
    normalize identically.
    """
    parts = urlsplit(url.strip())
    host = (parts.netloc or "").lower()
    if host.startswith("www."):
        host = host[4:]
    path = parts.path.rstrip("/")
    kept = [
        (k, v)
        for k, v in parse_qsl(parts.query, keep_blank_values=True)
        if k not in _TRACKING_KEYS and not any(k.startswith(p) for p in _TRACKING_PREFIXES)
    ]
    query = urlencode(kept)
    return f"{host}{path}" + (f"?{query}" if query else "")


def domain_of(url: str) -> str:
    host = (urlsplit(url.strip()).netloc or "").lower()
    return host[4:] if host.startswith("www.") else host

"""Provider failure modes shared across search, fetch, LLM, and embedding clients."""


class ProviderError(Exception):
    """Base class for provider failures."""


class ProviderUnavailable(ProviderError):
    """Network or auth failure that survived the retry policy."""


class QuotaExceeded(ProviderError):
    """The provider refused the request for rate/quota reasons."""


class FetchFailed(ProviderError):
    """A page could not be retrieved."""


class NonHtmlContent(ProviderError):
    """The fetched resource is not an HTML page; callers skip it."""


class SchemaViolationAfterRetries(ProviderError):
    """The LLM never produced output matching the registered schema."""

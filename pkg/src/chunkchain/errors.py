"""Shared error types surfaced to API clients and the CLI."""

from __future__ import annotations


class ApiError(Exception):
    """A request-level failure with a stable machine-readable code."""

    def __init__(self, code: str, message: str, retry_after_ms: int | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.retry_after_ms = retry_after_ms

    def to_json(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.retry_after_ms is not None:
            body["retry_after_ms"] = self.retry_after_ms
        return body

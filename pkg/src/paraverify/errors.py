"""Shared exception types."""

from __future__ import annotations


class ConcretizeError(Exception):
    """A concretization request cannot produce a well-formed finite instance."""


class ResourceLimitError(Exception):
    """A state-count or search-node limit was exceeded; never a wrong verdict."""


class PromotionError(Exception):
    """No validated quantifier assignment exists for a concrete invariant."""

from .base import ImageAdapter, LanguageAdapter
from .mock import MockImageAdapter, MockLanguageAdapter

__all__ = [
    "ImageAdapter",
    "LanguageAdapter",
    "MockImageAdapter",
    "MockLanguageAdapter",
]

"""Polish gender-inclusive notation toolkit."""

__version__ = "0.1.0"

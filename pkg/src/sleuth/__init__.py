"""sleuth: in-memory multi-model exploration engine for social-media corpora."""

__version__ = "0.1.0"

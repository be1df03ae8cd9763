"""Evidence-grounded question answering over a scholarly corpus."""

__version__ = "0.1.0"

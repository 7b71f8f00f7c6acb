"""Spans and bispans of finite sets: composition, canonical classes, evaluation."""

__version__ = "0.1.0"

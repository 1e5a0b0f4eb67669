"""Bidirectional CPC speech representation learning with frozen-feature CTC recognizers."""

__version__ = "0.1.0"

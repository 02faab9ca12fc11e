"""Uplink LDPC-coded SCMA with a joint iterative detection/decoding receiver."""

__version__ = "0.1.0"

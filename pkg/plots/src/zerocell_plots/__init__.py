"""Offline figure generation for zerocell result CSVs."""

__version__ = "0.1.0"

"""Exact verification tools for continuous orbit maps between one-sided
shifts of finite type."""

__version__ = "0.1.0"

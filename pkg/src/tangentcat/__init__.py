"""Exact tangent-category computations and their verification suites."""

__version__ = "0.1.0"

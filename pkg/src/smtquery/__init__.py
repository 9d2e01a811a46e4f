"""Benchmark analysis for SMT-LIB string-constraint corpora."""

__version__ = "0.1.0"

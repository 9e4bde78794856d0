"""Exact and certified verification of inequalities for sums of primes."""

__version__ = "0.1.0"

"""Numerical core: exact and extended-precision arithmetic, families, limits and zeros."""

"""Exact construction and checking of quantum moduli algebras a_P of punctured surfaces."""

__version__ = "0.1.0"

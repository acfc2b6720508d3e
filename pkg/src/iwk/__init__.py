"""Fixed-precision p-adic engine for cyclotomic Iwasawa-theoretic computations."""

__version__ = "0.1.0"

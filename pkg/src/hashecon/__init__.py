"""Economics of offline password cracking and hashing-parameter adoption."""

__version__ = "0.1.0"

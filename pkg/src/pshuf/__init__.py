"""
pshuf

Parallel ElGamal re-encryption shuffle with an interactive and Fiat-Shamir proof of shuffle,
an honest-verifier zero-knowledge simulator and executable witness extractors.
"""

__version__ = "0.1.0"
__author__ = "pshuf maintainers"

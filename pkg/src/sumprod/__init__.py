"""Exact-arithmetic workbench for sum-product phenomena over Q and F_p."""

__version__ = "0.1.0"

from .exact import (  # noqa: E402
    ExactSet,
    Rational,
    affine,
    card_prodset,
    card_quotset,
    diffset,
    prodset,
    quotset,
    sumset,
)

__all__ = [
    "ExactSet",
    "Rational",
    "affine",
    "card_prodset",
    "card_quotset",
    "diffset",
    "prodset",
    "quotset",
    "sumset",
]

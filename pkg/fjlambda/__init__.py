"""fjlambda - a reference interpreter and type checker for FJ&λ.

Featherweight Java extended with interfaces, default methods, λ-expressions,
intersection types and conditionals.
"""

__version__ = "0.1.0"

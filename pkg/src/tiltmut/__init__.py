"""Right tilting mutation for bound quiver algebras over the rationals."""

__version__ = "0.1.0"

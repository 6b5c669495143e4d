"""Exact PL machinery turning singular link concordances into link homotopies."""
__version__ = "0.1.0"

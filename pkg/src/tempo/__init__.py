"""DatalogMTL materialisation reasoner with temporal magic-set rewriting."""

__version__ = "0.1.0"

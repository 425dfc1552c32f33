"""Collaborative annotation platform for building morphologically and
syntactically tagged Uzbek corpora."""

__version__ = "0.1.0"

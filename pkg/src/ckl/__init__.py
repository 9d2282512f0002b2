"""Mahler measures of toroidal dimer models and bipyramid volumes of links."""

__version__ = "0.1.0"

"""Adaptive stratified Monte-Carlo integration on the unit hypercube (LMC-UCB)."""

__version__ = "0.1.0"

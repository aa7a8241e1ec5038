"""Simulation and optimization toolkit for RIS-aided joint radar and covert communication."""

__version__ = "0.1.0"

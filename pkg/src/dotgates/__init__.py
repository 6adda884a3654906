"""Quantum-dot exciton/biexciton spectra and optically driven qubit gates."""

__version__ = "0.1.0"

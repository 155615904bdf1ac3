"""Finite residuated lattices, their spectra, and presheaves/sheaves/étalé spaces of them."""

__version__ = "0.1.0"

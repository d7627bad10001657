"""Unitary and dissipative time evolution."""

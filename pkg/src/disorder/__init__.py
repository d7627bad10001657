"""Disorder ensembles over cavity on-site energies."""

"""Effective atom-only models from second-order perturbation theory."""

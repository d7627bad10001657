"""Parameter engineering by derivative-free optimization."""

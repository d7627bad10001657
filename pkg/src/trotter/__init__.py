"""Product-formula circuits and gate timing."""

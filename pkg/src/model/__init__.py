"""Model parameters, site ordering and Hamiltonian construction for the spin cavity."""

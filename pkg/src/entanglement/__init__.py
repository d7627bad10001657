"""Reduced states, concurrence and localization measures."""

"""Experiment runners, configuration and output writers for the command line."""

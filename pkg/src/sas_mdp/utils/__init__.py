"""Utility modules for the SAS-MDP package."""

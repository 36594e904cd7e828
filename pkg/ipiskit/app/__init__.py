"""IPIS toolkit application."""

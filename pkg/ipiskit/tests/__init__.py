"""Tests for the IPIS toolkit."""

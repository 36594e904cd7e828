"""Notation, normalization, metrics, corpus, prompting, rewriting and inference services."""

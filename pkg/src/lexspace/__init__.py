"""Lexical-space engine: book ingestion, family graphs, and adaptive vocabulary sessions."""

__version__ = "0.1.0"

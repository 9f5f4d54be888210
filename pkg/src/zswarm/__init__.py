"""Executable model of self-organized swarm shape formation."""

__version__ = "0.1.0"

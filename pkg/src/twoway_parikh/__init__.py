"""Two-way Parikh automata and their decision procedures."""

__version__ = "0.1.0"

"""Phase-space symmetries for continuous-variable QKD and an orthogonally
invariant bosonic de Finetti theorem, checked with exact and Monte-Carlo numerics."""

__version__ = "0.1.0"

"""Classical and physics-informed solvers for model PDEs."""

__version__ = "0.1.0"

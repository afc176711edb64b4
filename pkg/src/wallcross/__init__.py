"""Exact wall-and-chamber computations for quiver varieties, K3 stability and lattice VOAs."""

__version__ = "0.1.0"

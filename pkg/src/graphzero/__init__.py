"""GNN-guided AlphaZero-style engine that trains on small boards and plays
on arbitrarily large ones."""

__version__ = "0.1.0"

"""Topology-hiding connectivity assurance for multi-provider networks."""

__version__ = "0.1.0"

"""Capacity-region numerics for two-receiver broadcast channels whose
channel components are selected by a state known only at the receivers."""

__version__ = "0.1.0"

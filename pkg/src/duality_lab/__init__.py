"""Min-/max-entropy wave-particle duality relations for binary interferometers."""

__version__ = "0.1.0"

"""Simulation of optomechanical entanglement distillation and its teleportation check."""
__version__ = "0.1.0"

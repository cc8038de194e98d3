"""Lie group integrators on homogeneous spaces, with rigid-body and
multibody benchmark systems."""

from . import actions, integrators, kernels, lie, systems

__all__ = ["actions", "integrators", "kernels", "lie", "systems"]
__version__ = "0.1.0"

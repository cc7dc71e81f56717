"""
kleene_retract - exact section-retraction pairs between M, the product of
dyadic grids, the function space 2^(N x F) and N^(N^N).
"""

__version__ = "0.1.0"

from .base import FrozenStruct
from .dyadic import DyadicRational

# Submodules are loaded on first access
__all__ = [
    "FrozenStruct",
    "DyadicRational",
    "spaces",
    "retract_core",
    "retract_chain",
    "adversary",
]


def __getattr__(name):
    if name in ("spaces", "retract_core", "retract_chain", "adversary"):
        import importlib

        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module '{__name__}' has no attribute '{name}'")

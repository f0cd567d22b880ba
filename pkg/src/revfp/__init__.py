"""Reversible single-precision floating-point adder toolkit."""
from .core import (Circuit, CostReport, Gate, Wire, append, cost_summary, invert,
                   new_circuit, simulate)

__all__ = ["Circuit", "CostReport", "Gate", "Wire", "append", "cost_summary", "invert",
           "new_circuit", "simulate"]
__version__ = "0.1.0"

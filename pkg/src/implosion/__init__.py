"""Rigorous numerics for smooth self-similar imploding Euler flows.

Subpackages:
  rigor     interval arithmetic, interval polynomials and matrices
  algebra   closed-form phase-plane constants over (gamma, r)
  series    Taylor machinery at the sonic point and at the origin
  barriers  barrier curves and their transversality sign polynomials
  verify    branch-and-bound sign verification over parameter boxes
  solver    non-rigorous integration, shooting, profiles, diagnostics
  cli       command-line entry point
"""

__version__ = "0.1.0"

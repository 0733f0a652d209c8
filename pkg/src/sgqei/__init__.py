"""Order-by-order interacting energy density on timelike worldlines.

Evaluates the perturbative series for the energy density of a 2d massless
scalar with a cosine interaction, smeared along a timelike worldline, and
assembles the state-independent lower bound that goes with it.
"""

__version__ = "0.1.0"

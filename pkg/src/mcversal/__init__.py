"""mcversal: exact-arithmetic deformation theory over cone coefficient rings.

Core subpackages: grading data, rational cones, toric criteria, truncated
monoid rings, A-infinity structures with the shifted Hochschild complex,
Maurer-Cartan/gauge machinery, the order-by-order versality solver, and
flat-coordinate calculus.  The FastAPI service in `mcversal.service` wraps it
all; the `mcversal` CLI is a thin client of that service.
"""

__version__ = "0.1.0"

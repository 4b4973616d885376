"""Hyperbolic spin Calogero models on negative-curvature symmetric spaces.

Subpackages:
    algebra   -- symmetric-space realizations, root bases, ad_q calculus
    orbits    -- coadjoint orbits, momentum map, gauge slice, orbit reduction
    dynamics  -- Hamiltonian, Lax matrices, integrators, invariants, r-matrix
    models    -- closed-form spinless Calogero catalog
    checks    -- structural verification suite shared by tests and the CLI
    cli       -- configuration-driven command line runner
"""

__version__ = "0.1.0"

from . import algebra, checks, dynamics, models, orbits  # noqa: E402,F401

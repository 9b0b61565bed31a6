"""khbraid: Khovanov-type homology of braid closures and transverse invariants.

The package computes, with exact mod-p arithmetic, the homology of braid
closures for a family of rank-2 Frobenius-algebra theories, builds the
distinguished transverse cycles living in the oriented resolution, extracts
the integer invariants carried by their homology classes, and verifies
invariance under transverse Markov moves at the chain level.
"""

__version__ = "0.1.0"

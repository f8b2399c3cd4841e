"""bigtor: exact bigraded Tor of Stanley-Reisner rings over linear subrings.

The package computes Tor_{Z[u_1..u_n]}(Z[K], Z) for a simplicial complex
K and linear forms u_i cut out by an integer matrix B, entirely over Z,
and derives the verdicts that matter downstream: big Cohen-Macaulayness,
odd-degree vanishing, freeness and torsion diagnostics, GKM restriction
data, and the algebraic Gysin long exact sequence.
"""

__version__ = "0.1.0"

"""sstt: a proof checker for a three-layer simplicial type theory.

Layers: cubes (finite products of the directed interval), topes (a decidable
coherent logic of order constraints), and types (dependent type theory with
extension types).  Ships with a checked library of synthetic
infinity-category theory and a command line interface.
"""

__version__ = "0.1.0"

"""
Exact algebra over Weyl algebras: scalars, elements, Groebner bases,
modules, lattices and de Rham cohomology.
"""

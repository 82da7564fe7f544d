# src/polyrigid/__init__.py
"""polyrigid: rebuild polyhedra from their graph, edge lengths and dihedral angles."""
__version__ = "0.1.0"

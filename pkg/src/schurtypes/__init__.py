"""Exact induced maps and canonical homomorphisms of Schur-type tensor modules."""

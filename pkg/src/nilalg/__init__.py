"""Finite 2-nilpotent graded Lie algebras over F_p."""

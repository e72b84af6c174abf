"""Exact duals of Anderson t-modules over F_p(T)."""

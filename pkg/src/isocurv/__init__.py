"""Singular conformal metrics and isoperimetric inequality checks."""

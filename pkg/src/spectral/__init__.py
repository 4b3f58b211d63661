"""Numerical modules: g function, enclosure regions, delta models, Birman-Schwinger operators, shooting."""

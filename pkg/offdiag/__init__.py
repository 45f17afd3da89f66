"""
offdiag -- numerics for rank-one off-diagonal perturbations of a
multiplication operator: Borel transforms of the spectral data, pointwise
spectral classification, the boundary-value solution X_lambda of the Riccati
equation and a dense arrowhead-matrix oracle to check all of it against.
"""

__version__ = "1.0.0"

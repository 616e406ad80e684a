"""Verification and exploration engine for cohomogeneity-two Ricci solitons

    g = q^-2 (dx^2 / A(x) + dy^2 / B(y) + A(x) ds^2 + B(y) dt^2).
"""
__version__ = "0.1.0"

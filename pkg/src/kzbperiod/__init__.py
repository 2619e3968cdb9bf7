"""Exact metabelian de Rham period map of a once-punctured elliptic curve.

Modules, bottom up: :mod:`formal` (series and kernels), :mod:`curve`
(Weierstrass data), :mod:`metabelian` (the quotient Lie algebra),
:mod:`freealg` (free-algebra oracle), :mod:`kzb` (the connection pair) and
:mod:`period` (the period map itself).
"""
from .curve import Chart, CurveFn, CurveParams
from .formal import ZLSeries
from .freealg import NCSeries
from .metabelian import MetabElt, WOp

__version__ = "0.1.0"

__all__ = ["Chart", "CurveFn", "CurveParams", "MetabElt", "NCSeries", "WOp", "ZLSeries", "__version__"]

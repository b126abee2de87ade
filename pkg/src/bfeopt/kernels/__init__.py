"""Batch kernels for the regression objective.

A compiled Cython extension is preferred when available; a vectorized numpy
fallback is selected otherwise. Set BFEOPT_PURE_PYTHON=1 to force the
fallback (used by the backend benchmark).
"""
import os

from . import _linreg_py

BACKEND = "python"
linreg_loss = _linreg_py.linreg_loss
linreg_loss_grad = _linreg_py.linreg_loss_grad

if not os.environ.get("BFEOPT_PURE_PYTHON"):
    try:
        from . import _linreg_cy

        BACKEND = "cython"
        linreg_loss = _linreg_cy.linreg_loss
        linreg_loss_grad = _linreg_cy.linreg_loss_grad
    except ImportError:
        pass

__all__ = ["BACKEND", "linreg_loss", "linreg_loss_grad", "_linreg_py"]

"""Shared test utilities."""

import numpy as np

from swedg.dg import contravariant_fluxes


def roundoff_scale(W, mesh, params):
    """Size of the individual terms that cancel in a free-stream residual."""
    Ft, Gt = contravariant_fluxes(W, mesh, params)
    row = np.abs(mesh.ops.D_split).sum(axis=1).max()
    return max(np.abs(Ft).max(), np.abs(Gt).max()) * row / mesh.J.min()

"""Ensemble data assimilation over the Wasserstein space.

Assimilation is posed as an entropic-regularized transport barycenter
between the background-ensemble histogram and a perturbed-observation
histogram, next to the classic Euclidean baselines (3D-Var, stochastic
EnKF, SIR particle filter).  Twin experiments on Lorenz-63 and linear
advection-diffusion dynamics are driven by the :mod:`enrda.harness` CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]

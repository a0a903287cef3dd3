# Apache License, Version 2.0, refer to LICENSE.txt

"""Gaussian process classification with pseudo-marginal MCMC.

The compiled extension carries the full API; this package re-exports it.
"""

from pmgp._core import *  # noqa: F401,F403
from pmgp._core import __version__  # noqa: F401

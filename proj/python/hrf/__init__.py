"""Quantized-ADC ISAC CRB/rate boundary toolkit."""

from ._hrf import *  # noqa: F401,F403
from ._hrf import __version__  # noqa: F401

"""Rate regions and decoder simulations for classical-quantum interference channels."""

from .channels import CcqMac, CcqqChannel, classical_embed, induced_mac, load_channel, save_channel
from .errors import DimensionError, GuardError, QicError, ValidationError
from .geometry import Pentagon, RatePoint, RateRegion

__version__ = "0.1.0"

__all__ = [
    "CcqMac", "CcqqChannel", "classical_embed", "induced_mac", "load_channel", "save_channel",
    "DimensionError", "GuardError", "QicError", "ValidationError",
    "Pentagon", "RatePoint", "RateRegion", "__version__",
]

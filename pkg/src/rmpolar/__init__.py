"""Reed-Muller bit-channel polarization toolkit."""

__version__ = "0.1.0"

"""p-adic L-functions of modular forms via overconvergent modular symbols."""

__version__ = "0.1.0"

"""humbert-series: evaluate and cross-verify Humbert's functions Phi2, Phi3 and Psi2."""

__version__ = "0.3.0"

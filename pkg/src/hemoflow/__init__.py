"""hemoflow: finite-volume vascular flow toolkit with a PODI surrogate."""

__version__ = "0.1.0"

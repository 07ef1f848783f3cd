"""lpbox: numerical Littlewood-Paley theory for the inverse Gaussian measure."""

__version__ = "0.1.0"

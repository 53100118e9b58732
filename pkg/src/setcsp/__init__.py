"""Set-constraint satisfaction, its graph reduction, and exact small-scale oracles."""

__version__ = "0.1.0"

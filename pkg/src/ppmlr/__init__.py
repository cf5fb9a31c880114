"""PPMLR-MHD solver on a stretched magnetosphere grid with a partitioned run harness."""

__version__ = "0.1.0"

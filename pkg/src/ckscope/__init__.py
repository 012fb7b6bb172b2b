"""Workbench for intuitionistic modal logics between CK and IK."""

__version__ = "0.1.0"

"""
CLI Package
"""

from .dephasing_cli import DephasingCLI

__all__ = ['DephasingCLI']

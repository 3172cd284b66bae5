"""
Services Package

Simulation core and configuration for the dephasing simulator.
"""

__all__ = ['config', 'dephasing_core']

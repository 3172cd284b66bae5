"""
Libs Package

Shared error types and reporting for the dephasing simulator.
"""

__all__ = ['dephasing_exceptions', 'reporting']

"""
Reporting Package
"""

from .report_generator import ReportGenerator, format_float

__all__ = ['ReportGenerator', 'format_float']

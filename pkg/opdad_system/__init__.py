"""
OPDAD System
Online principal-direction tracking and burst-jamming detection for multi-antenna uplinks.
"""

__version__ = '1.0.0'

"""
MaxDist - computational toolkit for the Maximum Distance Problem
"""

__version__ = "1.0.0"

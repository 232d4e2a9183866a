"""
SmoothForge - smooth numbers, smooth ideals and S-unit constructions
"""

__version__ = "0.1.0"

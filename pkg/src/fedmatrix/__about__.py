__title__ = "fedmatrix"
__version__ = "0.1.0"

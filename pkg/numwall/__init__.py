"""
numwall - Number Walls over prime fields and their automatic tilings
"""
from numwall.core.constants import APP_VERSION

__version__ = APP_VERSION

"""
Core functionality for numwall
"""

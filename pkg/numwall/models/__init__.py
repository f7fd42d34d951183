"""
Data models for numwall: fields, sequences, series, walls and tilings
"""

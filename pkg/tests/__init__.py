"""
sympball test suite.
"""

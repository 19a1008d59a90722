"""
Test fixtures for reusable test data and helpers.
"""
"""
Integration tests for user journeys and system expectations.
"""
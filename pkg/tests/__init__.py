"""
Tests for the weylfiber engine, CLI and HTTP surface.
"""

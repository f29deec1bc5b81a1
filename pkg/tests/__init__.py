"""Dummy __init__.py to keep pytest happy."""


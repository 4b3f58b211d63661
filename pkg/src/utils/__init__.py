"""Utility helpers for artifact files."""

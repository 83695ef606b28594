"""Pydantic models for config, scene and report files."""

"""Bimanual dexterous grasp synthesis and demonstration generation."""

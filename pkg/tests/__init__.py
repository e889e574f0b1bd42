"""Tests for the K-center global solver."""

"""Tests for ngnboost."""

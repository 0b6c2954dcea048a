"""Tests for fjlambda."""

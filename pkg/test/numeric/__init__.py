"""Test collection for the numeric modules."""

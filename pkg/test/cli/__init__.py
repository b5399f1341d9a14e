"""Test collection for the cli modules."""

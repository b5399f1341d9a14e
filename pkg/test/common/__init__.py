"""Test collection for the common modules."""

"""Test collection for the adapter modules."""

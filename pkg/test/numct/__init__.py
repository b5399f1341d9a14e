"""Test collection for the numct modules."""

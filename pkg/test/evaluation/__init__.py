"""Test collection for the evaluation modules."""

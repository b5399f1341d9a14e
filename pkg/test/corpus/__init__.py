"""Test collection for the corpus modules."""

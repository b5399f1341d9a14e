"""The modules contained in this package define common utilities used across
the rest of the packages."""

"""The modules contained in this package detect numeric variables in text."""

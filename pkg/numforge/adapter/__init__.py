"""The modules contained in this package store, mix and merge low-rank
adapter modules."""

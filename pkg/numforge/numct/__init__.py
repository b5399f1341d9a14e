"""The modules contained in this package turn clean corpora into numeric-
masked multiple-choice instruction datasets."""

"""The files contained in this package are the shipped defaults: the paragraph
rules and the pipeline configuration."""

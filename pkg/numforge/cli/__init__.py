"""The modules contained in this package provide the ``forge`` command line:
configuration loading, run manifests and the pipeline stages."""

"""The modules contained in this package ingest raw textbook documents and
turn them into clean, paragraph-segmented documents."""

"""The modules contained in this package classify benchmark questions, build
few-shot prompts and turn predictions into accuracy reports."""

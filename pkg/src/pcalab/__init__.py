"""Partial combinatory algebras on the desk: combinator terms, Kleene's two
models, oracle dialogues, a Friedberg numbering, and refuters that turn
impossibility results into concrete counterexamples."""

__version__ = "0.1.0"

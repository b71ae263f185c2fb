"""Credible persuasion in finite environments: exact solvers and verifiers."""

__version__ = "0.1.0"

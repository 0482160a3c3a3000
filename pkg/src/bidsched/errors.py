"""Shared exception hierarchy; the CLI maps these onto stable exit codes."""

from __future__ import annotations


class BidschedError(Exception):
    """Base class for all package-specific failures."""


class InputError(BidschedError):
    """Malformed graph, objective, contract, tender, or config (exit code 2)."""


class SolverError(BidschedError):
    """A threshold solve did not converge or produced an inconsistent witness (exit code 3)."""


class OracleError(BidschedError):
    """Brute-force oracle guard tripped or found no consistent witness (exit code 3)."""


class PrunedStartError(BidschedError):
    """The initial vertex was pruned by LAS or a contract (exit code 4)."""

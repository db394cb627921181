"""
Work estimates for exhaustive operations.

Enumeration visits every restricted pairing, so its cost is known exactly before
it starts; the CLI uses that to warn ahead of long runs.
"""

from src.counting.formulas import count_restricted_pairings
from src.models.degseq import Bipartition, DegreeSequence


class WorkEstimator:
    """Estimate the size of exhaustive enumerations."""

    @staticmethod
    def pairing_count(ds: DegreeSequence, bip: Bipartition) -> int:
        """
        Number of pairings an exhaustive walk of M(L, R, d) will visit.

        Args:
            ds: Degree sequence
            bip: Bipartition (L, R)

        Returns:
            Exact restricted-pairing count
        """
        return count_restricted_pairings(ds, bip)

    @staticmethod
    def format_count(count: int) -> str:
        """Format a count for display."""
        if count < 1_000_000:
            return f"{count:,}"
        digits = str(count)
        return f"{digits[0]}.{digits[1:4]}e{len(digits) - 1}"


def get_work_warning_message(count: int, threshold: int = 1_000_000) -> str:
    """
    Generate a warning message if an enumeration is large.

    Args:
        count: Number of pairings to visit
        threshold: Warning threshold

    Returns:
        Warning message or empty string
    """
    if count >= threshold:
        return f"Large enumeration: about {WorkEstimator.format_count(count)} pairings will be visited"
    return ""

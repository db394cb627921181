"""Input validation utilities."""

from typing import Iterable, Optional, Sequence, Tuple

from src.utils.errors import BGraphError


class ValidationError(BGraphError, ValueError):
    """Custom exception for validation errors."""
    pass


class ParseError(ValidationError):
    """Validation error tied to a position in some text input."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DegreeValidator:
    """Validate degree vectors."""

    @staticmethod
    def validate_degrees(degrees: Sequence[int]) -> Tuple[bool, Optional[str]]:
        """
        Validate a degree vector.

        Args:
            degrees: Candidate degrees d_1..d_n

        Returns:
            Tuple of (is_valid, error_message)
        """
        for position, value in enumerate(degrees):
            if isinstance(value, bool) or not isinstance(value, int):
                return False, f"Degree at position {position + 1} is not an integer: {value!r}"
            if value < 0:
                return False, f"Negative degree {value} at position {position + 1}"
        return True, None


class SubsetValidator:
    """Validate vertex subsets."""

    @staticmethod
    def validate_subset(subset: Iterable[int], n: int) -> Tuple[bool, Optional[str]]:
        """
        Validate a vertex subset of [n] given as 0-based indices.

        Args:
            subset: Vertex indices
            n: Number of vertices

        Returns:
            Tuple of (is_valid, error_message)
        """
        seen = set()
        for index in subset:
            if isinstance(index, bool) or not isinstance(index, int):
                return False, f"Vertex index is not an integer: {index!r}"
            if index < 0 or index >= n:
                return False, f"Vertex index {index + 1} out of range 1..{n}"
            if index in seen:
                return False, f"Duplicate vertex index {index + 1}"
            seen.add(index)
        return True, None


class SubgraphValidator:
    """Validate the edge list of a prescribed induced subgraph."""

    @staticmethod
    def validate_edges(
        subset: Sequence[int], edges: Iterable[Tuple[int, int]]
    ) -> Tuple[bool, Optional[str]]:
        """
        Validate edges of H against its vertex set S.

        Args:
            subset: Vertex set S (0-based)
            edges: Edges of H as vertex pairs (0-based)

        Returns:
            Tuple of (is_valid, error_message)
        """
        members = set(subset)
        seen = set()
        for u, v in edges:
            if u not in members or v not in members:
                return False, f"Edge {u + 1}-{v + 1} has an endpoint outside S"
            if u == v:
                return False, f"Loop at vertex {u + 1} is not allowed in H"
            key = (min(u, v), max(u, v))
            if key in seen:
                return False, f"Repeated edge {key[0] + 1}-{key[1] + 1}"
            seen.add(key)
        return True, None

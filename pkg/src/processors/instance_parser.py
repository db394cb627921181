"""Parsing of instance descriptions: degree specs, L sets and H edge-list files."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from src.models.degseq import Bipartition, DegreeSequence, InducedSubgraphSpec
from src.utils.validators import ParseError, SubsetValidator, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstanceSpec:
    """Raw instance description as given on the command line."""

    degree_spec: str
    left_set: str = "none"
    subgraph: Optional[str] = None


class InstanceParser:
    """Parse the textual pieces of an instance."""

    @staticmethod
    def _parse_int(token: str, column: int, line: int = 1) -> int:
        token = token.strip()
        if not token or not (token.isdigit() or (token[0] in "+-" and token[1:].isdigit())):
            raise ParseError(f"expected an integer, found {token!r}", line, column)
        return int(token)

    @staticmethod
    def parse_degrees(spec: str) -> DegreeSequence:
        """
        Parse `term (',' term)*` where a term is INT or INT^INT.

        Args:
            spec: Degree spec such as "3,3,2,1" or "3^100"

        Returns:
            The degree sequence ("d^n" expands to n copies of d)

        Raises:
            ParseError: On malformed terms or negative degrees, with the column
        """
        if not spec or not spec.strip():
            raise ParseError("empty degree spec", 1, 1)
        degrees: List[int] = []
        column = 1
        for term in spec.split(","):
            if "^" in term:
                base, _, power = term.partition("^")
                degree = InstanceParser._parse_int(base, column)
                count = InstanceParser._parse_int(power, column + len(base) + 1)
                if count < 0:
                    raise ParseError(f"negative repeat count {count}", 1, column + len(base) + 1)
            else:
                degree, count = InstanceParser._parse_int(term, column), 1
            if degree < 0:
                raise ParseError(f"negative degree {degree}", 1, column)
            degrees.extend([degree] * count)
            column += len(term) + 1
        return DegreeSequence(tuple(degrees))

    @staticmethod
    def parse_left(text: Optional[str], n: int) -> Bipartition:
        """
        Parse a 1-based comma list of L vertices, or "none".

        Raises:
            ParseError: On malformed, duplicate or out-of-range indices
        """
        if text is None or text.strip().lower() in ("", "none"):
            return Bipartition.empty(n)
        indices = []
        column = 1
        for token in text.split(","):
            indices.append(InstanceParser._parse_int(token, column) - 1)
            column += len(token) + 1
        is_valid, error = SubsetValidator.validate_subset(indices, n)
        if not is_valid:
            raise ParseError(error, 1, 1)
        return Bipartition.from_left(n, indices)

    @staticmethod
    def parse_subgraph_text(text: str, n: int) -> InducedSubgraphSpec:
        """
        Parse an H file: a header `S: i1 ... is`, then one `u v` edge per line.

        Blank lines and lines starting with '#' are skipped. Vertex labels are 1-based.

        Raises:
            ParseError: Naming the offending line
        """
        subset: Optional[List[int]] = None
        edges: List[Tuple[int, int]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if subset is None:
                if not line.startswith("S:"):
                    raise ParseError("expected header `S: i1 i2 ... is`", number, 1)
                subset = [
                    InstanceParser._parse_int(token, raw.find(token) + 1, number) - 1
                    for token in line[2:].split()
                ]
                is_valid, error = SubsetValidator.validate_subset(subset, n)
                if not is_valid:
                    raise ParseError(error, number, 1)
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError(f"expected `u v`, found {line!r}", number, 1)
            u, v = (InstanceParser._parse_int(t, raw.find(t) + 1, number) - 1 for t in tokens)
            if u not in subset or v not in subset:
                raise ParseError(f"edge {u + 1} {v + 1} has an endpoint outside S", number, 1)
            edges.append((u, v))
        if subset is None:
            raise ParseError("missing header `S: i1 i2 ... is`", 1, 1)
        try:
            return InducedSubgraphSpec(tuple(subset), tuple(edges))
        except ParseError:
            raise
        except ValidationError as exc:
            raise ParseError(str(exc), 1, 1) from exc

    @staticmethod
    def parse_subgraph_file(file_path: str, n: int) -> InducedSubgraphSpec:
        """Read and parse an H file from disk."""
        path = Path(file_path)
        if not path.exists():
            raise ValidationError(f"Subgraph file does not exist: {file_path}")
        return InstanceParser.parse_subgraph_text(path.read_text(encoding="utf-8"), n)


def parse_instance(
    spec: InstanceSpec,
) -> Tuple[DegreeSequence, Bipartition, Optional[InducedSubgraphSpec]]:
    """
    Parse a full instance description.

    Returns:
        (degree sequence, bipartition, optional induced-subgraph spec)
    """
    ds = InstanceParser.parse_degrees(spec.degree_spec)
    bip = InstanceParser.parse_left(spec.left_set, ds.n)
    subgraph = None
    if spec.subgraph:
        subgraph = InstanceParser.parse_subgraph_file(spec.subgraph, ds.n)
    logger.debug("parsed instance n=%d M=%d |L|=%d", ds.n, ds.M, len(bip.left))
    return ds, bip, subgraph

"""
Document service for reading, validating and writing algebra and triple files.
"""

import json
import logging
import sys
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import LieAlgebra, bracket_table, from_brackets
from app.core.scalars import Backend, get_backend
from app.core.triples import KahlerTriple
from app.models.document_models import (
    AlgebraDocument,
    BracketRecord,
    BracketTerm,
    TripleDocument,
    render_matrix,
)
from app.utils.exceptions import DimensionMismatchError, DocumentParseError, ValidationError
from app.utils.validators import format_rational, validate_square_matrix

logger = logging.getLogger(__name__)

Document = Union[AlgebraDocument, TripleDocument]


class DocumentService:
    """Service for document I/O and conversion to and from core objects."""

    def __init__(self, backend: Optional[Backend] = None):
        self.backend = backend or get_backend()

    # Reading

    def read_json(self, path: str) -> Dict[str, Any]:
        """
        Read a JSON document; "-" reads stdin.

        Raises:
            DocumentParseError: With line and column of a syntax error
        """
        try:
            if path == "-":
                text = sys.stdin.read()
            else:
                with open(path, "r", encoding="utf-8") as handle:
                    text = handle.read()
        except OSError as e:
            raise DocumentParseError(f"Cannot read {path}: {e.strerror}", error_code="io_error", details={"path": path})
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentParseError(
                f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                error_code="invalid_json",
                details={"path": path, "line": e.lineno, "column": e.colno},
            )
        if not isinstance(data, dict):
            raise DocumentParseError(f"{path}: top-level value must be an object", error_code="invalid_document")
        return data

    def parse_algebra(self, data: Dict[str, Any], source: str = "<document>") -> AlgebraDocument:
        return self._validate(AlgebraDocument, data, source)

    def parse_triple(self, data: Dict[str, Any], source: str = "<document>") -> TripleDocument:
        return self._validate(TripleDocument, data, source)

    def _validate(self, model, data: Dict[str, Any], source: str):
        try:
            return model.model_validate(data)
        except PydanticValidationError as e:
            errors = [
                {"field": ".".join(str(part) for part in error["loc"]) or "<root>", "message": error["msg"]}
                for error in e.errors()
            ]
            first = errors[0]
            logger.warning(f"{source}: {len(errors)} validation error(s)")
            raise DocumentParseError(
                f"{source}: field '{first['field']}': {first['message']}",
                error_code="invalid_document",
                details={"path": source, "errors": errors},
            )

    def load_algebra(self, path: str) -> Tuple[LieAlgebra, HermitianStructure]:
        return self.algebra_from_document(self.parse_algebra(self.read_json(path), path))

    def load_triple(self, path: str) -> KahlerTriple:
        return self.triple_from_document(self.parse_triple(self.read_json(path), path))

    def load_any(self, path: str) -> Union[Tuple[LieAlgebra, HermitianStructure], KahlerTriple]:
        """An algebra document, or a triple document (recognised by its 'h' field)."""
        data = self.read_json(path)
        if "h" in data:
            return self.triple_from_document(self.parse_triple(data, path))
        return self.algebra_from_document(self.parse_algebra(data, path))

    def read_matrix(self, source: str, size: int, name: str) -> np.ndarray:
        """
        A matrix given inline as JSON (e.g. '[["0","1"],["0","0"]]') or as a file holding one.

        Raises:
            DocumentParseError: On unreadable JSON or non-rational entries
            DimensionMismatchError: On wrong shape
        """
        text = source
        if not source.lstrip().startswith("["):
            try:
                with open(source, "r", encoding="utf-8") as handle:
                    text = handle.read()
            except OSError as e:
                raise DocumentParseError(f"Cannot read {source}: {e.strerror}", error_code="io_error", details={"path": source})
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentParseError(
                f"{name}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                error_code="invalid_json",
                details={"line": e.lineno, "column": e.colno},
            )
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise DocumentParseError(f"{name}: expected a list of rows", error_code="invalid_document")
        try:
            return self._matrix(rows, size, name)
        except DimensionMismatchError:
            raise
        except ValidationError as e:
            raise DocumentParseError(f"{name}: {e.message}", error_code="invalid_document")

    # Conversion

    def _matrix(self, rows, size: int, name: str) -> np.ndarray:
        return self.backend.array(validate_square_matrix(rows, size, name))

    def algebra_from_document(self, document: AlgebraDocument) -> Tuple[LieAlgebra, HermitianStructure]:
        """
        Raises:
            LieAlgebraError: If the brackets violate the Jacobi identity
            HermitianStructureError: If g or J are invalid
        """
        brackets = {
            (record.i, record.j): {term.k: term.coeff for term in record.terms}
            for record in document.brackets
        }
        algebra = from_brackets(document.dim, brackets, self.backend, document.basis)
        structure = HermitianStructure(
            self._matrix(document.metric, document.dim, "metric"),
            self._matrix(document.J, document.dim, "J"),
            self.backend,
        )
        logger.debug(f"Loaded algebra of dimension {document.dim} with {len(brackets)} brackets")
        return algebra, structure

    def triple_from_document(self, document: TripleDocument) -> KahlerTriple:
        """
        Raises:
            TripleError: If 𝔥 is not Kähler or u, v are not derivations
        """
        algebra, structure = self.algebra_from_document(document.h)
        size = document.h.dim
        return KahlerTriple(
            algebra,
            structure,
            self._matrix(document.u, size, "u"),
            self._matrix(document.v, size, "v"),
            self.backend.scalar(document.c),
        )

    def algebra_to_document(self, algebra: LieAlgebra, structure: HermitianStructure) -> AlgebraDocument:
        records = [
            BracketRecord(
                i=i,
                j=j,
                terms=[BracketTerm(k=k, coeff=format_rational(value)) for k, value in sorted(terms.items())],
            )
            for (i, j), terms in sorted(bracket_table(algebra).items())
        ]
        return AlgebraDocument(
            dim=algebra.dim,
            basis=list(algebra.names) or [f"e{k}" for k in range(algebra.dim)],
            brackets=records,
            metric=render_matrix(structure.g),
            J=render_matrix(structure.J),
        )

    def triple_to_document(self, triple: KahlerTriple) -> TripleDocument:
        return TripleDocument(
            h=self.algebra_to_document(triple.algebra, triple.structure),
            u=render_matrix(triple.u),
            v=render_matrix(triple.v),
            c=format_rational(triple.c),
            n=triple.n,
        )

    # Writing

    def render(self, document: Union[Document, list]) -> str:
        if isinstance(document, list):
            return json.dumps([d.model_dump() for d in document], indent=2, ensure_ascii=False) + "\n"
        return json.dumps(document.model_dump(), indent=2, ensure_ascii=False) + "\n"

    def revalidate(self, document: Document) -> None:
        """Parse the rendered form back and rebuild the core objects."""
        data = json.loads(self.render(document))
        if isinstance(document, TripleDocument):
            self.triple_from_document(self.parse_triple(data))
        else:
            self.algebra_from_document(self.parse_algebra(data))

    def write(self, document: Union[Document, list], path: Optional[str] = None) -> None:
        """Re-validate, then write to `path`, or stdout when it is None or "-"."""
        for item in document if isinstance(document, list) else [document]:
            self.revalidate(item)
        text = self.render(document)
        if path is None or path == "-":
            sys.stdout.write(text)
            return
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")

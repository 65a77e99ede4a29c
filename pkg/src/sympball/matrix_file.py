"""
Matrix and subspace file formats for sympball.

Both formats are JSON documents tagged with their coordinate ordering.
Floats are written with 17 significant digits so that a write/read round
trip reproduces every entry bit for bit.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Union

import jsonschema
import numpy as np

from .exceptions import MatrixFileError
from .matcore import as_matrix
from .symplectic import ComplexSubspace, complex_subspace_from_span, phase_dimension
from .utils import ensure_directory, format_float

logger = logging.getLogger("sympball.matrix_file")

ORDERING = "x-then-p"
SCHEMA_DIR = Path(__file__).parent / "schemas"

SCHEMAS = {
    "matrix_file": "matrix_file.schema.json",
    "subspace_file": "subspace_file.schema.json",
    "projection_analysis": "projection_analysis.schema.json",
    "campaign_report": "campaign_report.schema.json",
}


# ============================================================================
# SCHEMAS
# ============================================================================

@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    """Load one of the bundled JSON schemas by name."""
    if name not in SCHEMAS:
        raise KeyError(f"Unknown schema: {name}")
    with open(SCHEMA_DIR / SCHEMAS[name], "r", encoding="utf-8") as f:
        return json.load(f)


def validate_document(document: Any, schema_name: str, path: Optional[str] = None) -> None:
    """
    Validate a JSON document against a bundled schema.

    Raises:
        MatrixFileError: If the document does not conform.
    """
    try:
        jsonschema.validate(instance=document, schema=load_schema(schema_name))
    except jsonschema.ValidationError as e:
        location = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise MatrixFileError(f"Document does not match the {schema_name} schema",
                              path=path, details=f"{location}: {e.message}")


# ============================================================================
# SERIALIZATION
# ============================================================================

def _format_row(values) -> str:
    return "[" + ", ".join(format_float(v) for v in values) + "]"


def _format_rows(key: str, rows) -> str:
    body = ",\n    ".join(_format_row(row) for row in rows)
    return f'  "{key}": [\n    {body}\n  ]'


def dumps_matrix(matrix) -> str:
    """Serialize a 2n x 2n matrix as a MatrixFile document."""
    m = as_matrix(matrix, "matrix")
    n = phase_dimension(m)
    return (
        "{\n"
        f'  "n": {n},\n'
        f'  "ordering": "{ORDERING}",\n'
        f"{_format_rows('rows', m)}\n"
        "}\n"
    )


def dumps_subspace(vectors) -> str:
    """Serialize spanning vectors (2n x m, one vector per column)."""
    v = as_matrix(vectors, "vectors")
    if v.shape[0] % 2:
        raise MatrixFileError("Vectors must have even length", details=f"shape {v.shape}")
    return (
        "{\n"
        f'  "n": {v.shape[0] // 2},\n'
        f'  "ordering": "{ORDERING}",\n'
        f"{_format_rows('vectors', v.T)}\n"
        "}\n"
    )


def write_text(path: Union[str, Path], text: str) -> Path:
    """Write text to a file, creating parent directories."""
    path = Path(path)
    try:
        if path.parent != Path(""):
            ensure_directory(path.parent)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise MatrixFileError("Cannot write file", path=str(path), details=str(e))
    logger.debug(f"Wrote {path}")
    return path


def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise MatrixFileError("Cannot read file", path=str(path), details=str(e))
    except json.JSONDecodeError as e:
        raise MatrixFileError("Invalid JSON", path=str(path), details=str(e))


# ============================================================================
# MATRIX FILES
# ============================================================================

@dataclass(frozen=True)
class MatrixFile:
    """A parsed matrix file."""

    n: int
    matrix: np.ndarray

    @classmethod
    def from_document(cls, document: Any, path: Optional[str] = None) -> "MatrixFile":
        validate_document(document, "matrix_file", path)
        n = document["n"]
        rows = document["rows"]
        size = 2 * n
        if len(rows) != size or any(len(row) != size for row in rows):
            raise MatrixFileError(f"Matrix must be {size} x {size} for n = {n}", path=path,
                                  details=f"{len(rows)} rows")
        return cls(n=n, matrix=np.array(rows, dtype=np.float64))

    def to_document(self) -> Dict[str, Any]:
        return {"n": self.n, "ordering": ORDERING, "rows": self.matrix.tolist()}


def read_matrix_file(path: Union[str, Path]) -> MatrixFile:
    """
    Read and validate a MatrixFile.

    Raises:
        MatrixFileError: On I/O, JSON or schema errors, or a size mismatch.
    """
    result = MatrixFile.from_document(_read_json(path), str(path))
    logger.debug(f"Read {2 * result.n}x{2 * result.n} matrix from {path}")
    return result


def write_matrix_file(path: Union[str, Path], matrix) -> Path:
    """Write a matrix as a MatrixFile."""
    return write_text(path, dumps_matrix(matrix))


# ============================================================================
# SUBSPACE FILES
# ============================================================================

def read_subspace_file(path: Union[str, Path]) -> ComplexSubspace:
    """
    Read spanning vectors and build the complex subspace they span.

    Raises:
        MatrixFileError: On I/O, JSON or schema errors, or wrong vector length.
        NotComplex: If the span is not J-invariant.
    """
    document = _read_json(path)
    validate_document(document, "subspace_file", str(path))
    n = document["n"]
    vectors = document["vectors"]
    if any(len(v) != 2 * n for v in vectors):
        raise MatrixFileError(f"Every vector must have length {2 * n}", path=str(path))
    return complex_subspace_from_span(np.array(vectors, dtype=np.float64).T)


def write_subspace_file(path: Union[str, Path], vectors) -> Path:
    """Write spanning vectors (2n x m, one per column)."""
    return write_text(path, dumps_subspace(vectors))


# ============================================================================
# RESULT DOCUMENTS
# ============================================================================

def dumps_document(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json(document: Any, destination: Union[str, Path, TextIO, None] = None,
               schema_name: Optional[str] = None) -> str:
    """
    Serialize a result document, optionally validating it first.

    Args:
        document: JSON-compatible object.
        destination: Path or open stream; nothing is written when omitted.
        schema_name: Bundled schema to validate against.

    Returns:
        The serialized text.
    """
    if schema_name:
        validate_document(document, schema_name)
    text = dumps_document(document)
    if destination is None:
        return text
    if isinstance(destination, (str, Path)):
        write_text(destination, text)
    else:
        destination.write(text)
    return text

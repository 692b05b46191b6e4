#!/usr/bin/env python3
"""
File formats and report rendering.
Pair documents and Delzant inequality documents are UTF-8 JSON validated with
pydantic models; pairs are emitted in a canonical byte-stable layout.
"""

import json
import logging
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError

from .charpair import CharacteristicPair
from .errors import ParseError
from .lattice import IntVector

logger = logging.getLogger("torsym.documents")

SAFE_INTEGER = 2 ** 53 - 1
_INTEGER = re.compile(r"^-?\d+$")
_RATIONAL = re.compile(r"^(-?\d+)(?:/(\d+))?$")

JsonInt = Union[StrictInt, str]


class PairDocument(BaseModel):
    """Serialized characteristic pair."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    n: StrictInt = Field(..., ge=0, description="Rank of the lattice")
    facets: List[str] = Field(..., description="Facet identifiers in document order")
    max_simplices: List[List[str]] = Field(..., description="Maximal faces as lists of facet identifiers")
    lambda_: Dict[str, List[JsonInt]] = Field(..., alias="lambda", description="Characteristic vector per facet")


class InequalityDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    normal: List[JsonInt] = Field(..., description="Outward facet normal")
    offset: JsonInt = Field(..., description="Right-hand side: integer or \"p/q\"")


class DelzantDocument(BaseModel):
    """Polytope {x : <normal_i, x> <= offset_i}."""
    model_config = ConfigDict(extra="forbid")

    n: StrictInt = Field(..., ge=1, description="Ambient dimension")
    inequalities: List[InequalityDocument] = Field(..., description="Facet inequalities")


def _to_int(value: Union[int, str], where: str) -> int:
    if isinstance(value, int):
        return value
    if _INTEGER.match(value.strip()):
        return int(value.strip())
    raise ParseError(f"{where}: {value!r} is not an integer")


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {str(e)}") from e


def _validated(model: type, data: Any) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ParseError(f"invalid document at {location or 'top level'}: {first['msg']}") from e


def parse_pair_document(text: str) -> CharacteristicPair:
    """
    Parse a pair document.

    Raises:
        ParseError: the text is not a well-formed pair document
    """
    doc = _validated(PairDocument, _load_json(text))
    if len(set(doc.facets)) != len(doc.facets):
        raise ParseError("facet identifiers repeat")
    known = set(doc.facets)
    for simplex in doc.max_simplices:
        unknown = [f for f in simplex if f not in known]
        if unknown:
            raise ParseError(f"max_simplices refers to unknown facets {unknown}")
        if len(set(simplex)) != len(simplex):
            raise ParseError(f"simplex {simplex} repeats a facet")
    if set(doc.lambda_) != known:
        raise ParseError(f"lambda keys {sorted(doc.lambda_)} do not match facets {doc.facets}")
    vectors = {
        facet: tuple(_to_int(x, f"lambda.{facet}") for x in doc.lambda_[facet]) for facet in doc.facets
    }
    return CharacteristicPair.build(doc.n, doc.facets, doc.max_simplices, vectors)


def json_int(value: int) -> Union[int, str]:
    """Integers beyond the double-precision safe range become decimal strings."""
    value = int(value)
    return value if -SAFE_INTEGER <= value <= SAFE_INTEGER else str(value)


def json_vector(vector: Sequence[int]) -> List[Union[int, str]]:
    return [json_int(x) for x in vector]


def json_matrix(matrix: np.ndarray) -> List[List[Union[int, str]]]:
    return [json_vector(row) for row in matrix]


def _inline(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(", ", ": "))


def emit_pair_document(pair: CharacteristicPair) -> str:
    """
    Canonical text of a pair: facets in document order, simplices sorted by
    facet position, two-space indentation, one inner list per line.
    """
    simplices = pair.complex.sorted_faces()
    lines = ["{", f'  "n": {pair.n},', f'  "facets": {_inline(list(pair.facets))},']
    if simplices:
        lines.append('  "max_simplices": [')
        for i, simplex in enumerate(simplices):
            comma = "," if i < len(simplices) - 1 else ""
            lines.append(f"    {_inline(list(simplex))}{comma}")
        lines.append("  ],")
    else:
        lines.append('  "max_simplices": [],')
    if pair.facets:
        lines.append('  "lambda": {')
        for i, facet in enumerate(pair.facets):
            comma = "," if i < len(pair.facets) - 1 else ""
            lines.append(f"    {_inline(facet)}: {_inline(json_vector(pair.lam(facet)))}{comma}")
        lines.append("  }")
    else:
        lines.append('  "lambda": {}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def pair_to_dict(pair: CharacteristicPair) -> Dict[str, Any]:
    """The document as a plain object, for embedding in reports."""
    return {
        "n": pair.n,
        "facets": list(pair.facets),
        "max_simplices": [list(s) for s in pair.complex.sorted_faces()],
        "lambda": {facet: json_vector(pair.lam(facet)) for facet in pair.facets},
    }


def _to_offset(value: Union[int, str], where: str) -> Fraction:
    if isinstance(value, int):
        return Fraction(value)
    match = _RATIONAL.match(value.strip())
    if not match:
        raise ParseError(f"{where}: {value!r} is not an integer or p/q")
    numerator, denominator = int(match.group(1)), int(match.group(2) or 1)
    if denominator == 0:
        raise ParseError(f"{where}: zero denominator")
    return Fraction(numerator, denominator)


def parse_delzant_document(text: str) -> List[Tuple[IntVector, Fraction]]:
    """
    Parse an inequality document into (normal, offset) pairs.

    Raises:
        ParseError: malformed document or a normal of the wrong length
    """
    doc = _validated(DelzantDocument, _load_json(text))
    inequalities = []
    for i, inequality in enumerate(doc.inequalities):
        where = f"inequalities.{i}"
        normal = tuple(_to_int(x, f"{where}.normal") for x in inequality.normal)
        if len(normal) != doc.n:
            raise ParseError(f"{where}: normal has length {len(normal)}, expected {doc.n}")
        inequalities.append((normal, _to_offset(inequality.offset, f"{where}.offset")))
    return inequalities


def delzant_to_dict(inequalities: Sequence[Tuple[Sequence[int], Any]]) -> Dict[str, Any]:
    """The inequality document as a plain object, offsets in lowest terms."""
    return {
        "n": len(inequalities[0][0]) if inequalities else 0,
        "inequalities": [
            {"normal": json_vector(normal), "offset": _offset_json(offset)} for normal, offset in inequalities
        ],
    }


def _offset_json(offset: Any) -> Union[int, str]:
    value = Fraction(str(offset))
    if value.denominator == 1:
        return json_int(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_report(report: Dict[str, Any], as_json: bool, text: Optional[List[str]] = None) -> str:
    """JSON with a stable key order, or the given text lines."""
    if as_json or text is None:
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    return "\n".join(text) + "\n"


def format_facets(facets: Sequence[str]) -> str:
    return "{" + ",".join(facets) + "}"


def format_vector(vector: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in vector) + ")"

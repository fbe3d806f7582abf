"""
Named examples: the 𝔤_b family, 𝔡₄, the unimodular series in every dimension,
the non-unimodular counterexample and 𝔯_{2,c}.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import LieAlgebra
from app.core.scalars import Backend, get_backend
from app.core.triples import (
    KahlerTriple,
    build_counterexample,
    build_d4,
    build_dim,
    build_gb,
    build_r2c,
    semidirect,
)
from app.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Example:
    name: str
    algebra: LieAlgebra
    structure: HermitianStructure
    triple: Optional[KahlerTriple] = None
    label: str = ""


def _from_triple(name: str, triple: KahlerTriple) -> Example:
    algebra, structure = semidirect(triple)
    return Example(name, algebra, structure, triple)


def _require(params: Dict, key: str, name: str):
    value = params.get(key)
    if value is None:
        raise ValidationError(f"Example '{name}' needs --{key}", error_code="missing_parameter")
    return value


def _gb(params: Dict, backend: Backend) -> Example:
    return _from_triple("gb", build_gb(_require(params, "b", "gb"), backend))


def _d4(params: Dict, backend: Backend) -> Example:
    return _from_triple("d4", build_d4(backend))


def _dim(params: Dict, backend: Backend) -> Example:
    n = _require(params, "n", "dim")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError(f"Example 'dim' needs an integer --n >= 1, got {n!r}", error_code="invalid_parameter")
    return _from_triple("dim", build_dim(n, backend))


def _counterexample(params: Dict, backend: Backend) -> Example:
    return _from_triple("counterexample", build_counterexample(backend))


def _r2c(params: Dict, backend: Backend) -> Example:
    algebra, structure = build_r2c(_require(params, "c", "r2c"), backend)
    return Example("r2c", algebra, structure)


EXAMPLES: Dict[str, Callable[[Dict, Backend], Example]] = {
    "gb": _gb,
    "d4": _d4,
    "dim": _dim,
    "counterexample": _counterexample,
    "r2c": _r2c,
}


def build_example(name: str, backend: Optional[Backend] = None, **params) -> Example:
    """
    Build a named example.

    Raises:
        ValidationError: On unknown names or missing parameters
    """
    builder = EXAMPLES.get(name)
    if builder is None:
        raise ValidationError(
            f"Unknown example '{name}'; choose from {', '.join(sorted(EXAMPLES))}",
            error_code="unknown_example",
        )
    example = builder(params, backend or get_backend())
    shown = ", ".join(f"{key}={value}" for key, value in sorted(params.items()) if value is not None)
    example = replace(example, label=f"{name}[{shown}]" if shown else name)
    logger.info(f"Built example '{name}' of dimension {example.algebra.dim}")
    return example


def corpus(backend: Optional[Backend] = None) -> Tuple[Example, ...]:
    """Named instances used by the verification suite."""
    backend = backend or get_backend()
    examples = [build_example("d4", backend)]
    examples += [build_example("gb", backend, b=b) for b in ("0", "1", "-2", "7/2")]
    examples += [build_example("dim", backend, n=n) for n in range(1, 6)]
    examples.append(build_example("counterexample", backend))
    return tuple(examples)

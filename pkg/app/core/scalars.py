"""
Scalar backends: exact rationals by default, floats with a global tolerance on request.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Optional, Tuple, Union

import numpy as np

from app.utils.exceptions import NotApplicableError, ValidationError
from app.utils.validators import parse_rational
from config.settings import get_settings

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]


@dataclass(frozen=True)
class Backend:
    """
    Arithmetic backend shared by every value built on it.

    The exact backend stores `Fraction` entries in numpy object arrays; the float
    backend stores float64 arrays and compares against `tol`.
    """

    name: str
    tol: float = 1e-9

    @property
    def exact(self) -> bool:
        return self.name == "exact"

    @property
    def dtype(self) -> Any:
        return object if self.exact else float

    def scalar(self, value: Any) -> Scalar:
        """Coerce ints, Fractions, rational strings and floats into a backend scalar."""
        if isinstance(value, str):
            value = parse_rational(value)
        if self.exact:
            if isinstance(value, float):
                if not math.isfinite(value):
                    raise ValidationError(f"Non-finite scalar {value!r}")
                return Fraction(value)
            return Fraction(value)
        return float(value)

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1.0

    def is_zero(self, value: Any) -> bool:
        if self.exact:
            return value == 0
        return abs(value) <= self.tol

    def equal(self, a: Any, b: Any) -> bool:
        return self.is_zero(a - b)

    def is_positive(self, value: Any) -> bool:
        if self.exact:
            return value > 0
        return value > self.tol

    def sqrt(self, value: Any) -> Scalar:
        """
        Square root; exact only for squares of rationals.

        Raises:
            NotApplicableError: Exact backend and `value` is not a rational square
        """
        if not self.exact:
            return math.sqrt(max(float(value), 0.0))
        value = Fraction(value)
        if value < 0:
            raise NotApplicableError(f"Square root of negative value {value}")
        num, den = value.numerator, value.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn != num or rd * rd != den:
            raise NotApplicableError(
                f"{value} is not a rational square; use LCK_BACKEND=float",
                error_code="irrational_sqrt",
            )
        return Fraction(rn, rd)

    def array(self, values: Iterable[Any]) -> np.ndarray:
        """Build an array of backend scalars from nested sequences."""
        raw = np.array(values, dtype=object)
        out = np.empty(raw.shape, dtype=self.dtype)
        for index, value in np.ndenumerate(raw):
            out[index] = self.scalar(value)
        return out

    def zeros(self, shape: Union[int, Tuple[int, ...]]) -> np.ndarray:
        if self.exact:
            return np.full(shape, Fraction(0), dtype=object)
        return np.zeros(shape, dtype=float)

    def identity(self, size: int) -> np.ndarray:
        out = self.zeros((size, size))
        for i in range(size):
            out[i, i] = self.one
        return out

    def basis_vector(self, size: int, index: int) -> np.ndarray:
        out = self.zeros(size)
        out[index] = self.one
        return out

    def convert(self, values: np.ndarray) -> np.ndarray:
        """Re-express an array built on another backend."""
        if np.ndim(values) == 0:
            return self.scalar(values)
        return self.array(np.asarray(values, dtype=object).tolist())

    def all_zero(self, values: Any) -> bool:
        return all(self.is_zero(x) for x in np.asarray(values, dtype=object).flat)

    def max_abs(self, values: Any) -> Scalar:
        """Largest absolute entry (the residual norm used in reports)."""
        flat = [abs(x) for x in np.asarray(values, dtype=object).flat]
        return max(flat) if flat else self.zero


@lru_cache(maxsize=None)
def _make_backend(name: str, tol: float) -> Backend:
    logger.debug(f"Creating {name} backend (tol={tol})")
    return Backend(name=name, tol=tol)


def get_backend(name: Optional[str] = None, tol: Optional[float] = None) -> Backend:
    """
    Get a backend instance, defaulting to LCK_BACKEND / LCK_TOL from settings.

    Args:
        name: "exact" or "float"
        tol: Tolerance of the float backend

    Returns:
        The cached backend
    """
    settings = get_settings()
    name = (name or settings.LCK_BACKEND).lower()
    if name not in ("exact", "float"):
        raise ValidationError(f"Unknown backend {name!r}")
    return _make_backend(name, float(tol if tol is not None else settings.LCK_TOL))


"""Exact scalars and multivariate polynomials over a fixed coordinate chart.

Scalars are :class:`fractions.Fraction`.  A :class:`Polynomial` lives in a
ring Q[x1..xm] with ``m`` fixed at construction; operands with different
``m`` never mix.  Every value is immutable.
"""
from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "StructuralError",
    "Rational",
    "to_rational",
    "rational_to_str",
    "rational_from_str",
    "Polynomial",
    "ZeroTest",
    "SYMBOLIC",
    "default_grid_size",
    "grid_points",
]

Rational = Fraction
Scalar = Union[int, Fraction]

GRID_ENV = "CARTAN_ALGEBROIDS_GRID"


class StructuralError(ValueError):
    """Operands have incompatible shapes (variable count, length, index)."""


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, str):
            return rational_from_str(value)
        raise TypeError(f"not an exact scalar: {value!r}")
    return Fraction(value)


def rational_to_str(q: Fraction) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def rational_from_str(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimals and zero denominators are rejected."""
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {type(text).__name__}")
    m = _RAT_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Polynomial:
    """Sparse polynomial with rational coefficients in ``nvars`` variables.

    Terms are stored as ``{exponent tuple: nonzero Fraction}``.  Iteration
    order (``terms``) is graded-lexicographic, highest term first, so equal
    polynomials have identical serializations.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if nvars < 0:
            raise StructuralError("negative variable count")
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise StructuralError(
                    f"exponent vector {exps} has length {len(exps)}, expected {nvars}"
                )
            if any((not isinstance(e, int)) or e < 0 for e in exps):
                raise StructuralError(f"bad exponent vector {exps}")
            c = to_rational(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "nvars", nvars)
        object.__setattr__(p, "_terms", terms)
        object.__setattr__(p, "_hash", None)
        return p

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "Polynomial":
        c = to_rational(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise StructuralError(f"variable index {i} out of range for {nvars} variables")
        exps = tuple(1 if k == i else 0 for k in range(nvars))
        return cls._raw(nvars, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Scalar = 1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): c})

    # inspection
    @property
    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def monomials(self) -> set[tuple[int, ...]]:
        return set(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise StructuralError(
                    f"variable count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Polynomial.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c: Scalar) -> "Polynomial":
        c = to_rational(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: k * c for e, k in self._terms.items()})

    def partial(self, var: int) -> "Polynomial":
        """Exact partial derivative with respect to variable ``var`` (0-based)."""
        if not 0 <= var < self.nvars:
            raise StructuralError(f"variable index {var} out of range for {self.nvars} variables")
        out = {}
        for e, c in self._terms.items():
            if e[var]:
                d = list(e)
                d[var] -= 1
                out[tuple(d)] = c * e[var]
        return Polynomial._raw(self.nvars, out)

    def __call__(self, point: Sequence[Scalar]) -> Fraction:
        return self.eval(point)

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise StructuralError(f"point has length {len(point)}, expected {self.nvars}")
        pt = [to_rational(p) for p in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x**k
            total += term
        return total

    # identity
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == Polynomial.const(self.nvars, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.nvars, frozenset(self._terms.items()))))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{rational_to_str(mag)}*{mono}"
            else:
                body = rational_to_str(mag)
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # serialization
    def to_json(self) -> list[dict]:
        return [
            {"coefficient": rational_to_str(c), "exponents": list(e)} for e, c in self.terms
        ]

    @classmethod
    def from_json(cls, data: list, nvars: int) -> "Polynomial":
        if not isinstance(data, list):
            raise ValueError("polynomial must be a list of term records")
        acc: dict[tuple[int, ...], Fraction] = {}
        for rec in data:
            if not isinstance(rec, dict) or set(rec) != {"coefficient", "exponents"}:
                raise ValueError("term record must have exactly 'coefficient' and 'exponents'")
            exps = rec["exponents"]
            if not isinstance(exps, list) or any(
                isinstance(k, bool) or not isinstance(k, int) for k in exps
            ):
                raise ValueError("exponents must be a list of integers")
            c = rational_from_str(rec["coefficient"])
            key = tuple(exps)
            if key in acc:
                raise ValueError(f"duplicate exponent vector {exps}")
            acc[key] = c
        try:
            return cls(nvars, acc)
        except StructuralError as exc:
            raise ValueError(str(exc)) from None


def default_grid_size() -> int:
    raw = os.environ.get(GRID_ENV)
    if raw is None:
        return 5
    n = int(raw)
    if n < 1:
        raise ValueError(f"{GRID_ENV} must be positive")
    return n


def grid_points(nvars: int, size: int) -> list[tuple[Fraction, ...]]:
    """``size`` integer values per coordinate centred on 0 (5 -> -2..2)."""
    values = [Fraction(k - size // 2) for k in range(size)]
    return list(itertools.product(values, repeat=nvars))


@dataclass(frozen=True)
class ZeroTest:
    """Policy for deciding that a polynomial residual vanishes identically.

    ``symbolic`` compares the canonical form with zero.  ``pointwise``
    evaluates exactly on a product grid with at least ``degree + 1`` values
    per coordinate, which decides the identity for that degree.
    """

    mode: str = "symbolic"
    grid: int = 5

    def __post_init__(self):
        if self.mode not in ("symbolic", "pointwise"):
            raise ValueError(f"unknown zero-test mode {self.mode!r}")

    def grid_for(self, degree: int) -> int:
        return max(self.grid, degree + 1)

    def is_zero(self, p: Polynomial) -> bool:
        if self.mode == "symbolic":
            return p.is_zero()
        if p.nvars == 0:
            return p.eval(()) == 0
        n = self.grid_for(p.degree)
        return all(p.eval(pt) == 0 for pt in grid_points(p.nvars, n))

    def all_zero(self, polys: Iterable[Polynomial]) -> bool:
        return all(self.is_zero(p) for p in polys)


SYMBOLIC = ZeroTest("symbolic")

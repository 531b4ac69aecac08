"""Sparse Laurent polynomials in z_1..z_d (any integer exponent) and lambda (exponent >= 0).

A term is keyed by the exponent tuple ``(a_1, ..., a_d, j)``; the last slot is
always the lambda exponent. Coefficients are either exact (``Fraction``) or
complex floats. Arithmetic between the two regimes is refused: conversion is
explicit through :meth:`LaurentPoly.to_complex`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Number
from typing import Iterable, Mapping

import numpy as np

Exponent = tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


def _normalize_coeff(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (bool, int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, (complex, float, np.floating, np.complexfloating)):
        return complex(c)
    if isinstance(c, Number):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class LaurentPoly:
    """Immutable sparse Laurent polynomial in ``d`` torus variables and lambda."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponent, object] | None = None):
        self.dim = int(dim)
        clean: dict[Exponent, object] = {}
        items = []
        for exp, c in (terms or {}).items():
            exp = tuple(int(x) for x in exp)
            if len(exp) != self.dim + 1:
                raise DimensionMismatch(f"exponent {exp} does not have {self.dim + 1} entries")
            if exp[-1] < 0:
                raise ValueError(f"negative lambda exponent in {exp}")
            items.append((exp, _normalize_coeff(c)))
        # one floating coefficient makes the whole polynomial floating
        if not all(isinstance(c, Fraction) for _, c in items):
            items = [(e, complex(c)) for e, c in items]
        for exp, c in items:
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c if exp in clean else c
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c) -> "LaurentPoly":
        return cls(dim, {(0,) * (dim + 1): c})

    @classmethod
    def monomial(cls, dim: int, a: Iterable[int], j: int = 0, c=1) -> "LaurentPoly":
        return cls(dim, {tuple(a) + (j,): c})

    @classmethod
    def z(cls, dim: int, i: int) -> "LaurentPoly":
        a = [0] * dim
        a[i] = 1
        return cls.monomial(dim, a)

    @classmethod
    def lam(cls, dim: int) -> "LaurentPoly":
        return cls.monomial(dim, [0] * dim, 1)

    # basic protocol -------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> set[Exponent]:
        return set(self._terms)

    def coeff(self, exp: Iterable[int]):
        return self._terms.get(tuple(exp), 0)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Number):
            other = LaurentPoly.constant(self.dim, other) if other != 0 else LaurentPoly(self.dim)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly({self.dim}, {render(self)!r})"

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.dim != self.dim:
                raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")
            return other
        if isinstance(other, Number):
            return LaurentPoly.constant(self.dim, other)
        return NotImplemented

    # ring operations ------------------------------------------------------
    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return LaurentPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, Number) and not isinstance(other, LaurentPoly):
            c = _normalize_coeff(other)
            if c == 0:
                return LaurentPoly(self.dim)
            return LaurentPoly(self.dim, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.dim, {e: c for e, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative powers are only defined for monomials")
        out = LaurentPoly.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # calculus -------------------------------------------------------------
    def toric_derivative(self, i: int) -> "LaurentPoly":
        """z_i d/dz_i (0-based index i < dim); each monomial scales by its exponent a_i."""
        if not 0 <= i < self.dim:
            raise IndexError(f"variable index {i} outside 0..{self.dim - 1}")
        return LaurentPoly(self.dim, {e: e[i] * c for e, c in self._terms.items() if e[i] != 0})

    def lambda_toric_derivative(self) -> "LaurentPoly":
        return LaurentPoly(self.dim, {e: e[-1] * c for e, c in self._terms.items() if e[-1] != 0})

    def lambda_derivative(self) -> "LaurentPoly":
        out = {}
        for e, c in self._terms.items():
            if e[-1]:
                out[e[:-1] + (e[-1] - 1,)] = e[-1] * c
        return LaurentPoly(self.dim, out)

    def partial_z(self, i: int) -> "LaurentPoly":
        """Ordinary partial derivative in z_i."""
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = e[i] * c
        return LaurentPoly(self.dim, out)

    def partial(self, k: int) -> "LaurentPoly":
        """Partial derivative in variable k, where k == dim means lambda."""
        return self.lambda_derivative() if k == self.dim else self.partial_z(k)

    # transformations ------------------------------------------------------
    def to_complex(self) -> "LaurentPoly":
        return LaurentPoly(self.dim, {e: complex(c) for e, c in self._terms.items()})

    def shift(self, s: Iterable[int]) -> "LaurentPoly":
        """Multiply by the monomial z^s (s has length dim)."""
        s = tuple(s) + (0,)
        return LaurentPoly(self.dim, {tuple(x + y for x, y in zip(e, s)): c for e, c in self._terms.items()})

    def scale_lambda(self, s) -> "LaurentPoly":
        """Substitute lambda -> s * lambda."""
        return LaurentPoly(self.dim, {e: c * s ** e[-1] for e, c in self._terms.items()})

    def facial_form(self, face_points: Iterable[Iterable[int]]) -> "LaurentPoly":
        keep = {tuple(p) for p in face_points}
        return LaurentPoly(self.dim, {e: c for e, c in self._terms.items() if e in keep})

    def clear_denominators(self) -> tuple["LaurentPoly", tuple[int, ...]]:
        """Return (z^s * p, s) with the smallest s >= 0 making every exponent nonnegative."""
        if not self._terms:
            raise ValueError("cannot clear denominators of the zero polynomial")
        s = tuple(max(0, -min(e[i] for e in self._terms)) for i in range(self.dim))
        return self.shift(s), s

    def lambda_degree(self) -> int:
        return max((e[-1] for e in self._terms), default=-1)

    def total_degree(self) -> int:
        """Degree as an ordinary polynomial; only meaningful after clearing denominators."""
        return max((sum(e) for e in self._terms), default=0)

    def lambda_slice(self, j: int) -> dict[tuple[int, ...], object]:
        return {e[:-1]: c for e, c in self._terms.items() if e[-1] == j}

    # evaluation -----------------------------------------------------------
    def evaluate(self, z, lam=0.0) -> complex:
        """Value at (z, lam); terms are summed in order of increasing |coefficient|."""
        z = [complex(x) for x in np.atleast_1d(z)]
        if len(z) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} torus coordinates, got {len(z)}")
        if any(x == 0 for x in z):
            raise ZeroDivisionError("Laurent polynomial evaluated at a zero torus coordinate")
        lam = complex(lam)
        vals = []
        for e, c in self._terms.items():
            v = complex(c)
            for zi, ai in zip(z, e[:-1]):
                if ai:
                    v *= zi ** ai
            if e[-1]:
                v *= lam ** e[-1]
            vals.append(v)
        vals.sort(key=abs)
        return complex(sum(vals))

    def compile(self) -> "CompiledPoly":
        return CompiledPoly(self)

    def coefficient_scale(self) -> float:
        return max((abs(complex(c)) for c in self._terms.values()), default=0.0)


class CompiledPoly:
    """Vectorized evaluator for a fixed Laurent polynomial over many points."""

    def __init__(self, p: LaurentPoly):
        self.dim = p.dim
        items = sorted(p.items())
        self.exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), p.dim + 1)
        self.coeffs = np.array([complex(c) for _, c in items], dtype=complex)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """points has shape (..., dim + 1) holding (z_1..z_d, lambda)."""
        pts = np.asarray(points, dtype=complex)
        mon = np.ones(pts.shape[:-1] + (len(self.coeffs),), dtype=complex)
        for k in range(self.dim + 1):
            col = self.exps[:, k]
            if np.any(col):
                mon = mon * pts[..., k, None] ** col
        return mon @ self.coeffs


# textual rendering ----------------------------------------------------------

def _fmt_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    c = complex(c)
    return f"({c.real!r}{c.imag:+}j)"


def render(p: LaurentPoly) -> str:
    """Render as ``c * z1^a1 * ... * lam^j`` terms joined by `` + ``."""
    if not p:
        return "0"
    parts = []
    for e in sorted(p.support(), key=lambda e: (-e[-1], tuple(-x for x in e[:-1]))):
        c = p.coeff(e)
        factors = [_fmt_coeff(c)]
        for i, a in enumerate(e[:-1]):
            if a:
                factors.append(f"z{i + 1}^{a}")
        if e[-1]:
            factors.append(f"lam^{e[-1]}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


_FACTOR = re.compile(r"^(z(\d+)|lam)\^(-?\d+)$")


def parse(text: str, dim: int) -> LaurentPoly:
    """Inverse of :func:`render` for exact (rational) coefficients."""
    text = text.strip()
    if text == "0":
        return LaurentPoly(dim)
    terms: dict[Exponent, object] = {}
    for chunk in text.split(" + "):
        factors = [f.strip() for f in chunk.split(" * ")]
        c = Fraction(factors[0])
        e = [0] * (dim + 1)
        for f in factors[1:]:
            m = _FACTOR.match(f)
            if not m:
                raise ValueError(f"cannot parse factor {f!r}")
            k = dim if m.group(1) == "lam" else int(m.group(2)) - 1
            if not 0 <= k <= dim:
                raise ValueError(f"variable {m.group(1)} outside dimension {dim}")
            e[k] += int(m.group(3))
        terms[tuple(e)] = terms.get(tuple(e), 0) + c
    return LaurentPoly(dim, terms)

"""Floquet matrix L(z) of a labeled periodic graph and its dispersion polynomial."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import Parameters, PeriodicGraph
from .laurent import LaurentPoly

MAX_EXACT_SIZE = 8


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FloquetMatrix:
    """m x m matrix of lambda-free Laurent polynomials in z."""

    entries: tuple[tuple[LaurentPoly, ...], ...]
    graph: PeriodicGraph | None = None
    params: Parameters | None = None

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def dim(self) -> int:
        return self.entries[0][0].dim

    def __getitem__(self, uv):
        u, v = uv
        return self.entries[u][v]

    def evaluate(self, z) -> np.ndarray:
        m = self.size
        out = np.empty((m, m), dtype=complex)
        for u in range(m):
            for v in range(m):
                out[u, v] = self.entries[u][v].evaluate(z, 0.0)
        return out

    def evaluator(self):
        """Vectorized z -> L(z) for arrays of torus points of shape (N, d)."""
        m, d = self.size, self.dim
        compiled = [[self.entries[u][v].compile() for v in range(m)] for u in range(m)]

        def f(zs):
            zs = np.atleast_2d(np.asarray(zs, dtype=complex))
            pts = np.concatenate([zs, np.zeros((zs.shape[0], 1), complex)], axis=1)
            out = np.empty((zs.shape[0], m, m), dtype=complex)
            for u in range(m):
                for v in range(m):
                    out[:, u, v] = compiled[u][v](pts)
            return out

        return f


def _negate_z(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(p.dim, {tuple(-x for x in e[:-1]) + (e[-1],): c for e, c in p.items()})


def floquet_matrix(g: PeriodicGraph, c: Parameters) -> FloquetMatrix:
    c.check(g)
    d, m = g.dimension, g.m
    acc: list[list[dict]] = [[{} for _ in range(m)] for _ in range(m)]
    zero = (0,) * (d + 1)

    def add(u, v, exp, val):
        cell = acc[u][v]
        cell[exp] = cell.get(exp, 0) + val

    for u in range(m):
        add(u, u, zero, c.potentials[u])
    for (u, v, a), w in zip(g.edges, c.weights):
        ea = tuple(a) + (0,)
        ena = tuple(-x for x in a) + (0,)
        # each orbit is incident once at u and once at v (twice at u when u == v)
        add(u, u, zero, w)
        add(v, v, zero, w)
        add(u, v, ea, -w)
        add(v, u, ena, -w)
    entries = tuple(tuple(LaurentPoly(d, acc[u][v]) for v in range(m)) for u in range(m))
    return FloquetMatrix(entries, g, c)


def check_symmetry(M: FloquetMatrix) -> bool:
    """True iff L(z)^T == L(z^-1) coefficientwise."""
    m = M.size
    return all(_negate_z(M[u, v]) == M[v, u] for u in range(m) for v in range(m))


def characteristic_polynomial(M: FloquetMatrix) -> LaurentPoly:
    """det(L(z) - lambda I) by Laplace expansion memoized over column subsets."""
    m = M.size
    if m > MAX_EXACT_SIZE:
        raise BudgetExceeded(f"exact expansion limited to {MAX_EXACT_SIZE} vertices (got {m})")
    d = M.dim
    lam = LaurentPoly.lam(d)
    shifted = [[M[u, v] - lam if u == v else M[u, v] for v in range(m)] for u in range(m)]

    @lru_cache(maxsize=None)
    def minor(cols: frozenset) -> LaurentPoly:
        row = m - len(cols)
        if not cols:
            return LaurentPoly.constant(d, 1)
        total = LaurentPoly.zero(d)
        ordered = sorted(cols)
        for pos, col in enumerate(ordered):
            entry = shifted[row][col]
            if not entry:
                continue
            term = entry * minor(cols - {col})
            total = total + term if pos % 2 == 0 else total - term
        return total

    return minor(frozenset(range(m)))


def dispersion(g: PeriodicGraph, c: Parameters) -> LaurentPoly:
    return characteristic_polynomial(floquet_matrix(g, c))

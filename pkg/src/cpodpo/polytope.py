"""Lattice polytopes in ambient dimension <= 4: hulls, face lattices, volumes, bounds.

Hull facets are proposed by Qhull and then re-derived and verified in exact
integer arithmetic, so every normal, face and volume reported here is exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import lattice
from .graph import PeriodicGraph, random_parameters, support
from .laurent import LaurentPoly

Point = tuple[int, ...]


@dataclass(frozen=True)
class Face:
    normal: tuple[int, ...]
    height: int
    points: tuple[Point, ...]
    dim: int
    is_base: bool
    is_vertical: bool

    @property
    def vertices(self) -> tuple[Point, ...]:
        return self.points


@dataclass
class NewtonPolytope:
    ambient: int
    points: tuple[Point, ...]
    vertices: tuple[Point, ...]
    dim: int
    normalized_volume: int
    _faces: list = field(default_factory=list, repr=False)
    _facet_ids: list = field(default_factory=list, repr=False)
    _axes: tuple = field(default=(), repr=False)
    _hull_rows: list = field(default_factory=list, repr=False)

    @property
    def volume(self) -> Fraction:
        """Euclidean volume in the ambient dimension (0 unless full-dimensional)."""
        if self.dim < self.ambient:
            return Fraction(0)
        return Fraction(self.normalized_volume, factorial(self.ambient))

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.ambient

    def facets(self) -> list[Face]:
        return [f for f in self.faces() if f.dim == self.dim - 1]

    def faces(self) -> list[Face]:
        return list(self._faces)

    def contains_point(self, p: Sequence[int]) -> bool:
        p = tuple(int(x) for x in p)
        if self.dim < self.ambient:
            base = self.points[0]
            rows = list(self._hull_rows) + [[x - y for x, y in zip(p, base)]]
            if lattice.rank(rows) > self.dim:
                return False
        if self.dim == 0:
            return p == self.points[0]
        for f in self.facets():
            if sum(w * x for w, x in zip(f.normal, p)) < f.height:
                return False
        return True

    def contains(self, other: "NewtonPolytope") -> bool:
        return all(self.contains_point(v) for v in other.vertices)

    def same_as(self, other: "NewtonPolytope") -> bool:
        return set(self.vertices) == set(other.vertices)

    def face_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for f in self._faces:
            out[f.dim] = out.get(f.dim, 0) + 1
        return dict(sorted(out.items()))


def _affine_axes(points: list[Point]) -> tuple[int, tuple[int, ...], list[list[int]]]:
    rows = lattice.hermite_rows(lattice.difference_rows(points)) if len(points) > 1 else []
    axes = tuple(next(c for c, x in enumerate(r) if x) for r in rows)
    return len(rows), axes, rows


def _hull_facets(q: list[Point], k: int) -> list[tuple[tuple[int, ...], int]]:
    """Exact facet inequalities w.x >= h of conv(q) for full-dimensional q in Z^k."""
    arr = np.array(q, dtype=np.int64)
    if k == 1:
        return [((1,), int(arr[:, 0].min())), ((-1,), int(-arr[:, 0].max()))]
    try:
        simplices = ConvexHull(arr.astype(float)).simplices.tolist()
    except QhullError:
        simplices = list(combinations(range(len(q)), k))
    found = {}
    for simp in simplices:
        base = q[simp[0]]
        diffs = [[x - y for x, y in zip(q[i], base)] for i in simp[1:]]
        w = lattice.integer_kernel_vector(diffs, k)
        if not any(w):
            continue
        vals = arr @ np.array(w, dtype=np.int64)
        h = int(np.dot(base, w))
        if vals.min() < h:
            if vals.max() > h:
                continue
            w = tuple(-x for x in w)
            h = -h
        if w in found:
            continue
        on = [q[i] for i in range(len(q)) if int(np.dot(q[i], w)) == h]
        if len(on) >= k and lattice.rank(lattice.difference_rows(on)) == k - 1:
            found[w] = h
    return sorted(found.items())


def convex_hull(points: Iterable[Sequence[int]]) -> NewtonPolytope:
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    n = len(pts[0])
    k, axes, rows = _affine_axes(pts)
    if k == 0:
        face = Face(tuple([0] * n), 0, (pts[0],), 0, False, False)
        return NewtonPolytope(n, tuple(pts), (pts[0],), 0, 0, [], [], axes, rows)
    q = [tuple(p[a] for a in axes) for p in pts]
    ineqs = _hull_facets(q, k)
    qarr = np.array(q, dtype=np.int64)

    facet_sets = []
    for w, h in ineqs:
        facet_sets.append(frozenset(np.nonzero(qarr @ np.array(w, dtype=np.int64) == h)[0].tolist()))

    # face lattice = all nonempty intersections of facets
    faces = set(facet_sets)
    frontier = set(facet_sets)
    while frontier:
        new = set()
        for f in frontier:
            for g in facet_sets:
                x = f & g
                if x and x not in faces:
                    new.add(x)
        faces |= new
        frontier = new

    def face_dim(ids) -> int:
        sub = [pts[i] for i in sorted(ids)]
        return lattice.rank(lattice.difference_rows(sub)) if len(sub) > 1 else 0

    dims = {f: face_dim(f) for f in faces}
    vertex_ids = sorted(next(iter(f)) for f in faces if dims[f] == 0)
    vertices = tuple(pts[i] for i in vertex_ids)

    e_vec = [0] * n
    e_vec[-1] = 1
    nonneg_last = all(p[-1] >= 0 for p in pts)
    base_ids = frozenset(i for i, p in enumerate(pts) if p[-1] == 0)

    face_records = []
    for f in sorted(faces, key=lambda f: (dims[f], sorted(f))):
        members = [i for i, g in enumerate(facet_sets) if f <= g]
        w = [0] * k
        for i in members:
            for t in range(k):
                w[t] += ineqs[i][0][t]
        w = lattice.primitive(w)
        vals = qarr @ np.array(w, dtype=np.int64)
        h = int(vals.min())
        assert frozenset(np.nonzero(vals == h)[0].tolist()) == f, "face not exposed by summed normal"
        w_amb = [0] * n
        for t, a in enumerate(axes):
            w_amb[a] = w[t]
        fpts = tuple(pts[i] for i in sorted(f))
        diffs = lattice.difference_rows(list(fpts))
        vertical = bool(diffs) and lattice.rank(diffs + [e_vec]) == lattice.rank(diffs)
        is_base = nonneg_last and bool(base_ids) and f == base_ids
        if is_base:
            # e_n always exposes the base; in a degenerate hull the summed normal need not be e_n
            w_amb, h = list(e_vec), 0
        face_records.append(Face(tuple(w_amb), h, fpts, dims[f], is_base, vertical))

    normalized = 0
    if k == n:
        normalized = _normalized_volume(pts, faces, dims, k)
    return NewtonPolytope(n, tuple(pts), vertices, k, normalized, face_records,
                          [i for i, f in enumerate(face_records) if f.dim == k - 1], axes, rows)


def _normalized_volume(pts, faces, dims, k) -> int:
    """Sum of |det| over a pulling triangulation (k! times the Euclidean volume)."""
    by_dim: dict[int, list] = {}
    for f in faces:
        by_dim.setdefault(dims[f], []).append(f)
    verts_of = {}
    for f in faces:
        verts_of[f] = sorted(v for g in by_dim.get(0, []) for v in g if v in f)

    cache = {}

    def simplices(f, fd):
        if f in cache:
            return cache[f]
        v0 = verts_of[f][0]
        if fd == 0:
            out = [(v0,)]
        else:
            out = []
            for g in by_dim.get(fd - 1, []):
                if g <= f and v0 not in g:
                    out.extend((v0,) + s for s in simplices(g, fd - 1))
        cache[f] = out
        return out

    whole = frozenset(range(len(pts)))
    verts_of[whole] = sorted(v for g in by_dim.get(0, []) for v in g)
    total = 0
    for s in simplices(whole, k):
        base = pts[s[0]]
        total += abs(lattice.integer_det([[x - y for x, y in zip(pts[i], base)] for i in s[1:]]))
    return total


def normalized_volume(P: NewtonPolytope) -> int:
    return P.normalized_volume if P.full_dimensional else 0


def faces(P: NewtonPolytope, A: Iterable[Sequence[int]] | None = None) -> list[Face]:
    """Proper nonempty faces with the lattice points of A on each.

    For a lower-dimensional P the polytope itself is included, since in the
    ambient space it is exposed by any normal of its affine hull.
    """
    Q = P if A is None else convex_hull(A)
    out = Q.faces()
    if not Q.full_dimensional and Q.dim > 0:
        w_face = _whole_face(Q)
        out = out + [w_face]
    elif Q.dim == 0:
        out = [Face(tuple([0] * Q.ambient), 0, Q.points, 0, False, False)]
    return out


def _whole_face(Q: NewtonPolytope) -> Face:
    n = Q.ambient
    e_vec = [0] * n
    e_vec[-1] = 1
    diffs = lattice.difference_rows(list(Q.points))
    vertical = lattice.rank(diffs + [e_vec]) == lattice.rank(diffs)
    # a normal orthogonal to the affine hull
    normal = tuple([0] * n)
    for c in combinations(range(n), Q.dim + 1):
        rows = [[r[i] for i in c] for r in Q._hull_rows]
        if lattice.rank(rows) == Q.dim:
            w = lattice.integer_kernel_vector(rows, Q.dim + 1) if Q.dim + 1 > 1 else (1,)
            full = [0] * n
            for t, i in enumerate(c):
                full[i] = w[t]
            normal = tuple(full)
            break
    h = sum(a * b for a, b in zip(normal, Q.points[0]))
    return Face(normal, h, Q.points, Q.dim, False, vertical)


def vertical_by_projection(face: Face) -> bool:
    """Some two lattice points of the face differ only in the lambda coordinate."""
    proj = [p[:-1] for p in face.points]
    return len(set(proj)) < len(proj)


# polytopes attached to graphs and polynomials ---------------------------------

def newton_polytope(p: LaurentPoly) -> NewtonPolytope:
    if not p:
        raise ValueError("Newton polytope of the zero polynomial")
    return convex_hull(p.support())


def support_volume_normalized(g: PeriodicGraph) -> int:
    """d! vol(conv A(G)) as an integer."""
    P = convex_hull(support(g))
    return P.normalized_volume if P.full_dimensional else 0


def predicted_polytope(g: PeriodicGraph) -> NewtonPolytope:
    """m Q with Q = conv(A(G) u {e})."""
    d, m = g.dimension, g.m
    pts = [tuple(m * x for x in a) + (0,) for a in support(g)] + [(0,) * d + (m,)]
    return convex_hull(pts)


def theorem_a_bound(g: PeriodicGraph) -> int:
    """d! m^(d+1) vol(conv A(G)); checked against the normalized volume of m Q."""
    bound = g.m ** (g.dimension + 1) * support_volume_normalized(g)
    mq = predicted_polytope(g).normalized_volume
    if mq != bound:
        raise AssertionError(f"pyramid identity failed: {mq} != {bound}")
    return bound


def kushnirenko_bound(D: LaurentPoly) -> int:
    return normalized_volume(newton_polytope(D))


def generic_newton_polytope(g: PeriodicGraph, seed: int = 0, samples: int = 3) -> NewtonPolytope:
    """Hull of the union of supports of D_c over random rational labels.

    Equals the Newton polytope of the graph unless every draw lands on a
    measure-zero coefficient cancellation.
    """
    from .floquet import dispersion

    if samples < 3:
        raise ValueError("need at least 3 samples")
    rng = random.Random(seed)
    pts: set[Point] = set()
    for _ in range(samples):
        c = random_parameters(g, rng.randrange(2**31), "rational")
        pts |= dispersion(g, c).support()
    return convex_hull(pts)


def lattice_index(A: Iterable[Sequence[int]]) -> int | None:
    """[Z^n : ZA] for the difference lattice of A; None when infinite."""
    return lattice.lattice_index(A)

"""Z^d-periodic graphs given by a fundamental domain and edge orbits."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .lattice import spans_full_lattice

Offset = tuple[int, ...]
Orbit = tuple[int, int, Offset]


class GraphError(ValueError):
    """Base class for invalid graph input."""


class GraphParseError(GraphError):
    pass


class LoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedError(GraphError):
    """The quotient graph on the fundamental domain is not connected."""


class SpanError(GraphError):
    """The support does not span Z^d over the integers."""


class ParameterError(ValueError):
    pass


def _lex_positive(a: Offset) -> bool:
    for x in a:
        if x:
            return x > 0
    return False


def canonical_orbit(u: int, v: int, a: Sequence[int]) -> Orbit:
    """Canonical representative of the orbit of the edge (u, a + v).

    (u, a+v) and (v, -a+u) describe the same orbit; the representative has
    u < v, or u == v with a lexicographically positive.
    """
    a = tuple(int(x) for x in a)
    if u == v and not any(a):
        raise LoopError(f"loop at vertex index {u} with zero offset")
    neg = tuple(-x for x in a)
    if u > v or (u == v and not _lex_positive(a)):
        return (v, u, neg)
    return (u, v, a)


@dataclass(frozen=True)
class PeriodicGraph:
    dimension: int
    vertices: tuple[str, ...]
    edges: tuple[Orbit, ...]

    def __post_init__(self):
        if not 1 <= self.dimension <= 3:
            raise GraphError(f"dimension must be 1, 2 or 3 (got {self.dimension})")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex labels")
        if not self.vertices:
            raise GraphError("empty fundamental domain")
        seen = set()
        canon = []
        for u, v, a in self.edges:
            if not (0 <= u < len(self.vertices) and 0 <= v < len(self.vertices)):
                raise GraphError(f"edge ({u}, {v}) references an unknown vertex")
            if len(a) != self.dimension:
                raise GraphError(f"offset {a} does not have {self.dimension} entries")
            e = canonical_orbit(u, v, a)
            if e in seen:
                name = f"{self.vertices[e[0]]}|{self.vertices[e[1]]}|{','.join(map(str, e[2]))}"
                raise DuplicateEdgeError(f"duplicate edge orbit {name}")
            seen.add(e)
            canon.append(e)
        object.__setattr__(self, "edges", tuple(canon))
        self._check_connected()

    def _check_connected(self):
        m = len(self.vertices)
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges:
            parent[find(u)] = find(v)
        if len({find(x) for x in range(m)}) > 1:
            raise DisconnectedError("quotient graph on the fundamental domain is disconnected")
        if not spans_full_lattice([a for _, _, a in self.edges], self.dimension):
            raise SpanError(f"integer span of the support is not Z^{self.dimension}")

    @property
    def m(self) -> int:
        return len(self.vertices)

    def edge_key(self, k: int) -> str:
        u, v, a = self.edges[k]
        return f"{self.vertices[u]}|{self.vertices[v]}|{','.join(str(x) for x in a)}"

    def edge_keys(self) -> list[str]:
        return [self.edge_key(k) for k in range(len(self.edges))]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "vertices": list(self.vertices),
            "edges": [
                {"from": self.vertices[u], "to": self.vertices[v], "offset": list(a)}
                for u, v, a in self.edges
            ],
        }


def support(g: PeriodicGraph) -> set[Offset]:
    """All a with an edge between W and a + W; symmetric under negation."""
    out = set()
    for _, _, a in g.edges:
        out.add(a)
        out.add(tuple(-x for x in a))
    return out


def parse_graph(text: str) -> PeriodicGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return graph_from_dict(data)


def graph_from_dict(data: dict) -> PeriodicGraph:
    if not isinstance(data, dict):
        raise GraphParseError("graph file must hold a JSON object")
    for key in ("dimension", "vertices", "edges"):
        if key not in data:
            raise GraphParseError(f"missing field '{key}'")
    d = data["dimension"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise GraphParseError("field 'dimension' must be an integer")
    verts = data["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise GraphParseError("field 'vertices' must be a list of strings")
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for k, e in enumerate(data["edges"]):
        if not isinstance(e, dict):
            raise GraphParseError(f"edges[{k}] must be an object")
        for key in ("from", "to", "offset"):
            if key not in e:
                raise GraphParseError(f"edges[{k}] missing field '{key}'")
        if e["from"] not in index or e["to"] not in index:
            raise GraphParseError(f"edges[{k}] references unknown vertex")
        off = e["offset"]
        if not isinstance(off, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in off):
            raise GraphParseError(f"edges[{k}].offset must be a list of integers")
        if len(off) != d:
            raise GraphParseError(f"edges[{k}].offset has length {len(off)}, expected {d}")
        edges.append((index[e["from"]], index[e["to"]], tuple(off)))
    return PeriodicGraph(d, tuple(verts), tuple(edges))


def serialize_graph(g: PeriodicGraph) -> str:
    return json.dumps(g.to_json(), indent=2)


def dense_graph(d: int, m: int, A: Iterable[Sequence[int]], labels: Sequence[str] | None = None) -> PeriodicGraph:
    """Graph with an edge between every pair of vertices of W and a + W for a in A."""
    A = {tuple(int(x) for x in a) for a in A}
    if any(len(a) != d for a in A):
        raise GraphError(f"support vectors must have {d} entries")
    if any(tuple(-x for x in a) not in A for a in A):
        raise GraphError("support is not centrally symmetric")
    if not spans_full_lattice(sorted(A), d):
        raise SpanError(f"integer span of the support is not Z^{d}")
    orbits = set()
    for a in sorted(A):
        for u, v in product(range(m), repeat=2):
            if u == v and not any(a):
                continue
            orbits.add(canonical_orbit(u, v, a))
    labels = tuple(labels) if labels else tuple(f"v{i}" for i in range(m))
    return PeriodicGraph(d, labels, tuple(sorted(orbits)))


@dataclass(frozen=True)
class Parameters:
    weights: tuple
    potentials: tuple
    mode: str = field(default="rational")

    @property
    def is_real(self) -> bool:
        vals = self.weights + self.potentials
        return all(isinstance(x, Fraction) or abs(complex(x).imag) == 0 for x in vals)

    def check(self, g: PeriodicGraph) -> None:
        if len(self.weights) != len(g.edges):
            raise ParameterError(f"{len(self.weights)} weights for {len(g.edges)} edge orbits")
        if len(self.potentials) != g.m:
            raise ParameterError(f"{len(self.potentials)} potentials for {g.m} vertices")

    def scaled(self, s) -> "Parameters":
        return Parameters(tuple(w * s for w in self.weights), tuple(v * s for v in self.potentials), self.mode)

    def to_json(self, g: PeriodicGraph) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return f"{x.numerator}/{x.denominator}"
            x = complex(x)
            return [x.real, x.imag]

        return {
            "weights": {k: enc(w) for k, w in zip(g.edge_keys(), self.weights)},
            "potentials": {v: enc(p) for v, p in zip(g.vertices, self.potentials)},
        }


def _decode_value(x, where: str):
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"{where}: cannot read rational {x!r}") from exc
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    raise ParameterError(f"{where}: expected 'p/q' string or [re, im] pair")


def parameters_from_dict(g: PeriodicGraph, data: dict) -> Parameters:
    if not isinstance(data, dict) or "weights" not in data or "potentials" not in data:
        raise ParameterError("parameter file needs 'weights' and 'potentials' objects")
    weights_in = dict(data["weights"])
    weights = []
    for u, v, a in g.edges:
        key = f"{g.vertices[u]}|{g.vertices[v]}|{','.join(map(str, a))}"
        if key not in weights_in:
            raise ParameterError(f"missing weight for edge {key}")
        weights.append(_decode_value(weights_in.pop(key), key))
    if weights_in:
        raise ParameterError(f"weights for unknown edges: {sorted(weights_in)}")
    pots_in = dict(data["potentials"])
    pots = []
    for v in g.vertices:
        if v not in pots_in:
            raise ParameterError(f"missing potential for vertex {v}")
        pots.append(_decode_value(pots_in.pop(v), v))
    if pots_in:
        raise ParameterError(f"potentials for unknown vertices: {sorted(pots_in)}")
    vals = weights + pots
    exact = all(isinstance(x, Fraction) for x in vals)
    if not exact:
        weights = [complex(x) for x in weights]
        pots = [complex(x) for x in pots]
    return Parameters(tuple(weights), tuple(pots), "rational" if exact else "complex")


def parse_parameters(g: PeriodicGraph, text: str) -> Parameters:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parameters_from_dict(g, data)


def random_parameters(
    g: PeriodicGraph,
    seed: int,
    mode: str = "rational",
    num_range: int = 50,
    den_range: int = 20,
) -> Parameters:
    """Reproducible random labels.

    Rational mode draws p/q with p in [-num_range, num_range] \\ {0} and q in
    [1, den_range]; complex mode draws real and imaginary parts from [-1, 1].
    """
    rng = random.Random(seed)
    n = len(g.edges) + g.m
    if mode == "rational":
        vals = []
        for _ in range(n):
            p = 0
            while p == 0:
                p = rng.randint(-num_range, num_range)
            vals.append(Fraction(p, rng.randint(1, den_range)))
    elif mode == "complex":
        vals = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]
    else:
        raise ParameterError(f"unknown parameter mode {mode!r}")
    k = len(g.edges)
    return Parameters(tuple(vals[:k]), tuple(vals[k:]), mode)

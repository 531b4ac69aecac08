"""Total-degree homotopy continuation for square polynomial systems.

Paths are tracked in projective space on a random affine chart, so endpoints
at infinity stay finite (they show up as a vanishing homogenizing
coordinate). All paths advance together as one batch of numpy arrays, each
with its own time and step size.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .laurent import LaurentPoly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    gamma_seed: int = 0
    predictor: str = "rk4"
    max_step: float = 0.05
    min_step: float = 1e-14
    max_steps: int = 20000
    corrector_iters: int = 3
    corrector_tol: float = 1e-9
    max_correction: float = 1e-3
    tail_zone: float = 1e-6
    divergence_bound: float = 1e10
    refine_tol: float = 1e-11
    refine_iters: int = 50
    max_refine_move: float = 1e-4
    valuation_tol: float = 0.1
    singular_residual: float = 1e-8
    tol_regular: float = 1e-8
    tol_dedup: float = 1e-6
    torus_min: float = 1e-8
    torus_max: float = 1e8
    real_tol: float = 1e-6
    retrack: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


class PolySystem:
    """Square system of ordinary polynomials, each stored as (exponents, coefficients)."""

    def __init__(self, polys: Sequence[tuple[np.ndarray, np.ndarray]], torus: Sequence[bool] | None = None,
                 names: Sequence[str] | None = None):
        self.polys = [(np.asarray(e, dtype=np.int64), np.asarray(c, dtype=complex)) for e, c in polys]
        self.nvars = max((e.shape[1] for e, _ in self.polys if e.ndim == 2), default=0)
        self.polys = [(e.reshape(-1, self.nvars), c) for e, c in self.polys]
        if any(e.shape[1] != self.nvars for e, _ in self.polys):
            raise ValueError("equations disagree on the number of variables")
        if np.any(np.concatenate([e.ravel() for e, _ in self.polys]) < 0):
            raise ValueError("PolySystem needs nonnegative exponents; clear denominators first")
        self.torus = tuple(torus) if torus is not None else (True,) * self.nvars
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(self.nvars))
        self.degrees = tuple(int(e.sum(axis=1).max()) if len(e) else 0 for e, _ in self.polys)
        self._stack()

    @property
    def square(self) -> bool:
        return len(self.polys) == self.nvars

    @classmethod
    def from_laurent(cls, polys: Sequence[LaurentPoly], use_lambda: bool = True,
                     names: Sequence[str] | None = None, shifts=None) -> "PolySystem":
        """Clear each Laurent polynomial by its own monomial (or by the given shifts)."""
        out = []
        n = polys[0].dim + (1 if use_lambda else 0)
        for k, p in enumerate(polys):
            if shifts is not None:
                q = p.shift(shifts[k])
            elif p:
                q, _ = p.clear_denominators()
            else:
                q = p
            items = sorted(q.items())
            if not items:
                out.append((np.zeros((0, n), np.int64), np.zeros(0, complex)))
                continue
            e = np.array([k if use_lambda else k[:-1] for k, _ in items], dtype=np.int64)
            if not use_lambda and any(k[-1] for k, _ in items):
                raise ValueError("lambda appears in a system declared lambda-free")
            out.append((e, np.array([complex(c) for _, c in items])))
        d = polys[0].dim
        torus = (True,) * d + ((False,) if use_lambda else ())
        return cls(out, torus, names)

    def _stack(self):
        exps, rows, cols = [], [], []
        for i, (e, c) in enumerate(self.polys):
            exps.append(e)
            rows.extend(range(sum(len(x) for x in exps[:-1]), sum(len(x) for x in exps)))
            cols.extend([i] * len(e))
        self._E = np.concatenate(exps, axis=0) if exps else np.zeros((0, self.nvars), np.int64)
        C = np.zeros((len(self._E), len(self.polys)), dtype=complex)
        C[rows, cols] = np.concatenate([c for _, c in self.polys])
        self._C = C
        self._absC = np.abs(C)

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        mon = _monomials(np.atleast_2d(X), self._E)
        return mon @ self._C

    def term_scale(self, X: np.ndarray) -> np.ndarray:
        mon = _monomials(np.atleast_2d(X), self._E)
        return np.abs(mon) @ self._absC

    def jacobian(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        _, dmon = _monomials_and_derivatives(X, self._E)
        return np.einsum("vpt,te->pev", dmon, self._C)


def _power_table(X: np.ndarray, maxdeg: int) -> np.ndarray:
    pw = np.empty(X.shape + (maxdeg + 1,), dtype=complex)
    pw[..., 0] = 1.0
    for k in range(1, maxdeg + 1):
        pw[..., k] = pw[..., k - 1] * X
    return pw


def _monomials(X: np.ndarray, E: np.ndarray) -> np.ndarray:
    maxdeg = int(E.max()) if E.size else 0
    pw = _power_table(X, maxdeg)
    mon = np.ones((X.shape[0], E.shape[0]), dtype=complex)
    for v in range(E.shape[1]):
        if np.any(E[:, v]):
            mon *= pw[:, v, E[:, v]]
    return mon


def _monomials_and_derivatives(X: np.ndarray, E: np.ndarray):
    """Monomials and their partial derivatives, without dividing by coordinates."""
    P, n = X.shape
    maxdeg = int(E.max()) if E.size else 0
    pw = _power_table(X, maxdeg)
    factors = [pw[:, v, E[:, v]] for v in range(n)]
    prefix = [np.ones((P, E.shape[0]), dtype=complex)]
    for v in range(n):
        prefix.append(prefix[-1] * factors[v])
    suffix = [np.ones((P, E.shape[0]), dtype=complex)]
    for v in reversed(range(n)):
        suffix.append(suffix[-1] * factors[v])
    suffix = suffix[::-1]
    dmon = np.empty((n, P, E.shape[0]), dtype=complex)
    for v in range(n):
        lower = pw[:, v, np.maximum(E[:, v] - 1, 0)] * E[:, v]
        dmon[v] = prefix[v] * lower * suffix[v + 1]
    return prefix[-1], dmon


# homotopy ------------------------------------------------------------------

class _Homotopy:
    """H(X, t) = [gamma (1 - t) G(X) + t F(X); c.X - 1] on C^(n+1)."""

    def __init__(self, sys: PolySystem, degrees: Sequence[int], gamma: complex, patch: np.ndarray):
        n = sys.nvars
        self.n = n
        self.gamma = gamma
        self.patch = patch
        self.deg = np.array(degrees, dtype=np.int64)
        E_h, C_rows = [], []
        for i, (e, c) in enumerate(sys.polys):
            scale = np.max(np.abs(c))
            h = np.concatenate([(degrees[i] - e.sum(axis=1))[:, None], e], axis=1)
            E_h.append(h)
            C_rows.append((i, c / scale))
        self.E = np.concatenate(E_h, axis=0)
        self.C = np.zeros((len(self.E), n), dtype=complex)
        start = 0
        for (i, c), h in zip(C_rows, E_h):
            self.C[start:start + len(h), i] = c
            start += len(h)

    def target(self, X):
        mon, dmon = _monomials_and_derivatives(X, self.E)
        F = mon @ self.C
        JF = np.einsum("vpt,te->pev", dmon, self.C)
        return F, JF

    def start(self, X):
        x0 = X[:, 0:1]
        xs = X[:, 1:]
        d = self.deg[None, :]
        G = xs ** d - x0 ** d
        P = X.shape[0]
        JG = np.zeros((P, self.n, self.n + 1), dtype=complex)
        idx = np.arange(self.n)
        JG[:, idx, idx + 1] = d * xs ** (d - 1)
        JG[:, :, 0] = -d * x0 ** (d - 1)
        return G, JG

    def eval(self, X, t):
        """Returns H (P, n+1), dH/dX (P, n+1, n+1) and dH/dt (P, n+1)."""
        F, JF = self.target(X)
        G, JG = self.start(X)
        tt = t[:, None]
        P = X.shape[0]
        H = np.empty((P, self.n + 1), dtype=complex)
        H[:, :self.n] = self.gamma * (1 - tt) * G + tt * F
        H[:, self.n] = X @ self.patch - 1
        J = np.empty((P, self.n + 1, self.n + 1), dtype=complex)
        J[:, :self.n, :] = self.gamma * (1 - tt)[:, :, None] * JG + tt[:, :, None] * JF
        J[:, self.n, :] = self.patch[None, :]
        Ht = np.zeros((P, self.n + 1), dtype=complex)
        Ht[:, :self.n] = F - self.gamma * G
        return H, J, Ht


def _solve(J, b):
    # row equilibration: the homogenized rows differ in scale by many orders of magnitude
    r = np.max(np.abs(J), axis=2)
    r = np.where((r > 0) & np.isfinite(r), r, 1.0)
    J = J / r[:, :, None]
    b = b / r
    try:
        return np.linalg.solve(J, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for i in range(len(b)):
            try:
                out[i] = np.linalg.solve(J[i], b[i])
            except np.linalg.LinAlgError:
                out[i] = np.nan
        return out


@dataclass
class StartSystem:
    degrees: tuple[int, ...]
    gamma: complex
    patch: np.ndarray
    points: np.ndarray  # projective start points, shape (N, n+1)

    @property
    def path_count(self) -> int:
        return len(self.points)


def total_degree_start(sys: PolySystem, gamma_seed: int = 0) -> StartSystem:
    """Start system x_i^d_i = x_0^d_i with roots-of-unity solutions on a random chart."""
    if not sys.square:
        raise ValueError(f"system is not square: {len(sys.polys)} equations, {sys.nvars} unknowns")
    if any(d < 1 for d in sys.degrees):
        raise ValueError("start system needs every equation to have degree >= 1")
    rng = np.random.default_rng(gamma_seed)
    theta = rng.uniform(0, 2 * np.pi)
    gamma = complex(np.exp(1j * theta))
    n = sys.nvars
    patch = (rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)) / np.sqrt(2 * (n + 1))
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in sys.degrees]
    pts = np.array([(1.0,) + combo for combo in product(*roots)], dtype=complex)
    pts = pts / (pts @ patch)[:, None]
    return StartSystem(sys.degrees, gamma, patch, pts)


@dataclass
class PathResult:
    endpoints: np.ndarray  # projective, shape (N, n+1)
    t: np.ndarray
    status: np.ndarray  # "done", "tail" or "failed"
    steps: np.ndarray
    valuations: np.ndarray  # d log|x_k / x_0| / d log(1 - t) near the end, per coordinate


def track(start: StartSystem, target: PolySystem, options: SolverOptions = SolverOptions(),
          which: np.ndarray | None = None) -> PathResult:
    """Predictor-corrector tracking of all start points from t = 0 to t = 1."""
    hom = _Homotopy(target, start.degrees, start.gamma, start.patch)
    X = start.points.copy() if which is None else start.points[which].copy()
    return _track(hom, X, options, projective=True)


def _track(hom, X: np.ndarray, opts: SolverOptions, projective: bool) -> PathResult:
    X = X.copy()
    P = len(X)
    t = np.zeros(P)
    h = np.full(P, min(opts.max_step, 0.01))
    wins = np.zeros(P, dtype=np.int64)
    steps = np.zeros(P, dtype=np.int64)
    status = np.array(["active"] * P, dtype=object)
    snap_X = np.full_like(X, np.nan)
    snap_t = np.full(P, np.nan)

    def tangent(Xc, tc):
        _, J, Ht = hom.eval(Xc, tc)
        return -_solve(J, Ht)

    while True:
        act = np.nonzero(status == "active")[0]
        if len(act) == 0:
            break
        Xa, ta = X[act], t[act]
        hh = np.minimum(h[act], 1.0 - ta)
        hc = hh[:, None]
        if opts.predictor == "euler":
            Xp = Xa + hc * tangent(Xa, ta)
        else:
            k1 = tangent(Xa, ta)
            k2 = tangent(Xa + 0.5 * hc * k1, ta + 0.5 * hh)
            k3 = tangent(Xa + 0.5 * hc * k2, ta + 0.5 * hh)
            k4 = tangent(Xa + hc * k3, ta + hh)
            Xp = Xa + hc * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        tn = ta + hh
        ok = np.isfinite(Xp).all(axis=1)
        prev = np.full(len(act), np.inf)
        Xc = np.where(ok[:, None], Xp, Xa)
        for it in range(opts.corrector_iters):
            H, J, _ = hom.eval(Xc, tn)
            dx = -_solve(J, H)
            nrm = np.linalg.norm(dx, axis=1)
            bad = ~np.isfinite(nrm)
            ok &= ~bad
            if it == 0:
                # a large first correction means the predictor left the path's basin
                ok &= nrm <= opts.max_correction * np.maximum(1.0, np.linalg.norm(Xc, axis=1))
            ok &= ~(nrm > 0.5 * prev) | (nrm < opts.corrector_tol)
            Xc = Xc + np.where(bad[:, None], 0, dx)
            prev = np.where(bad, np.inf, nrm)
        scale = np.maximum(1.0, np.linalg.norm(Xc, axis=1))
        ok &= prev <= opts.corrector_tol * scale

        acc = act[ok]
        X[acc] = Xc[ok]
        t[acc] = tn[ok]
        steps[act] += 1
        wins[acc] += 1
        grow = acc[wins[acc] >= 3]
        h[grow] = np.minimum(2 * h[grow], opts.max_step)
        wins[grow] = 0
        status[acc[t[acc] >= 1.0]] = "done"
        if not projective:
            far = acc[np.linalg.norm(X[acc], axis=1) > opts.divergence_bound]
            status[far] = "infinity"
        fresh = acc[np.isnan(snap_t[acc]) & (1.0 - t[acc] <= opts.tail_zone)]
        snap_X[fresh] = X[fresh]
        snap_t[fresh] = t[fresh]

        rej = act[~ok]
        h[rej] = 0.5 * hh[~ok]
        wins[rej] = 0
        stuck = rej[(h[rej] < opts.min_step)]
        over = act[steps[act] >= opts.max_steps]
        for idx in np.union1d(stuck, over).astype(np.int64):
            if status[idx] != "active":
                continue
            status[idx] = "tail" if 1.0 - t[idx] < opts.tail_zone else "failed"
    if not projective:
        return PathResult(X, t, status, steps, np.full(X.shape, np.nan))
    return PathResult(X, t, status, steps, _valuations(snap_X, snap_t, X, t, status))


def _valuations(X1, t1, X2, t2, status) -> np.ndarray:
    """Slopes of log|x_k/x_0| against log(1-t) between the tail-zone entry and the end.

    A path heading to a point of the torus has slopes near zero; a path that
    escapes to a coordinate hyperplane or to infinity shows the nonzero
    exponent of its Puiseux expansion. Needs two decades of 1-t to be read.
    """
    n = X2.shape[1] - 1
    out = np.full((len(X2), n), np.nan)
    tail = np.nonzero(status == "tail")[0]
    if len(tail) == 0:
        return out
    a, b = 1.0 - t1[tail], 1.0 - t2[tail]
    span = np.log(b) - np.log(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        l1 = np.log(np.abs(X1[tail, 1:] / X1[tail, :1]))
        l2 = np.log(np.abs(X2[tail, 1:] / X2[tail, :1]))
        v = (l2 - l1) / span[:, None]
    v[~(span < -np.log(100.0))] = np.nan
    out[tail] = v
    return out


# parameter families ----------------------------------------------------------

class SegmentHomotopy:
    """H(x, t) = sum_k t^k F_k(x), one square system per power of t, tracked in affine space."""

    def __init__(self, systems: Sequence[PolySystem]):
        n = systems[0].nvars
        exps = sorted({tuple(r) for S in systems for e, _ in S.polys for r in e})
        index = {e: k for k, e in enumerate(exps)}
        self.E = np.array(exps, dtype=np.int64).reshape(-1, n)
        self.C = np.zeros((len(systems), len(exps), n), dtype=complex)
        for k, S in enumerate(systems):
            for i, (e, c) in enumerate(S.polys):
                for row, val in zip(e, c):
                    self.C[k, index[tuple(row)], i] += val
        self.n = n

    def _coeffs(self, t):
        K = self.C.shape[0]
        pw = t[:, None] ** np.arange(K)[None, :]
        dpw = np.zeros_like(pw)
        dpw[:, 1:] = np.arange(1, K)[None, :] * t[:, None] ** np.arange(K - 1)[None, :]
        return np.einsum("pk,kte->pte", pw, self.C), np.einsum("pk,kte->pte", dpw, self.C)

    def eval(self, X, t):
        mon, dmon = _monomials_and_derivatives(X, self.E)
        Cs, dCs = self._coeffs(np.asarray(t, dtype=float))
        H = np.einsum("pt,pte->pe", mon, Cs)
        J = np.einsum("vpt,pte->pev", dmon, Cs)
        Ht = np.einsum("pt,pte->pe", mon, dCs)
        return H, J, Ht


def track_segment(hom: SegmentHomotopy, points: np.ndarray, options: SolverOptions = SolverOptions()) -> PathResult:
    return _track(hom, np.asarray(points, dtype=complex), options, projective=False)


@dataclass
class MonodromyLog:
    loops: int = 0
    added: list = field(default_factory=list)
    stopped: str = ""

    def to_dict(self) -> dict:
        return {"loops": self.loops, "added_per_loop": list(self.added), "stopped": self.stopped}


def monodromy_complete(segment, base, sample, base_system: PolySystem, seeds: Sequence[np.ndarray],
                       target: int | None, options: SolverOptions = SolverOptions(),
                       max_loops: int = 40, stall_loops: int = 5, seed: int = 0):
    """Grow a set of regular torus solutions by tracking it around random parameter loops.

    segment(p, q) returns a SegmentHomotopy from parameters p (t=0) to q (t=1);
    sample(rng) draws a random parameter point. Loops are triangles through
    the base point, so every returned endpoint is checked as a solution of the
    base system. Stops at `target` solutions or after `stall_loops`
    consecutive loops that add nothing.
    """
    rng = np.random.default_rng(seed)
    known = [np.asarray(x, dtype=complex) for x in seeds]
    log_ = MonodromyLog()
    if not known:
        log_.stopped = "no seeds"
        return known, log_
    stall = 0
    while log_.loops < max_loops:
        if target is not None and len(known) >= target:
            log_.stopped = "target reached"
            break
        p1, p2 = sample(rng), sample(rng)
        X = np.array(known)
        for a, b in ((base, p1), (p1, p2), (p2, base)):
            res = track_segment(segment(a, b), X, options)
            X = res.endpoints[res.status == "done"]
            if len(X) == 0:
                break
        log_.loops += 1
        ref = np.array(known)
        new = 0
        for x in X:
            sol = classify(newton_refine(base_system, x, options.refine_iters, options.refine_tol), base_system, options)
            if not (sol.converged and sol.regular and sol.on_torus):
                continue
            scale = max(1.0, np.linalg.norm(sol.point))
            if np.min(np.linalg.norm(ref - sol.point, axis=1)) < options.tol_dedup * scale:
                continue
            known.append(sol.point)
            ref = np.vstack([ref, sol.point])
            new += 1
        log_.added.append(new)
        log.debug("monodromy loop %d: %d new, %d known", log_.loops, new, len(known))
        stall = 0 if new else stall + 1
        if stall >= stall_loops:
            log_.stopped = "stalled"
            break
    else:
        log_.stopped = "loop budget"
    if not log_.stopped:
        log_.stopped = "target reached"
    return known, log_


# endpoints -----------------------------------------------------------------

@dataclass
class Solution:
    point: np.ndarray
    residual: float
    sigma_min: float
    jac_norm: float
    converged: bool
    path_ids: list[int] = field(default_factory=list)
    cluster_size: int = 1
    regular: bool = False
    on_torus: bool = False
    real_torus: bool = False

    def to_dict(self, names: Sequence[str]) -> dict:
        return {
            "point": {nm: [float(v.real), float(v.imag)] for nm, v in zip(names, self.point)},
            "residual": float(self.residual),
            "sigma_min": float(self.sigma_min),
            "cluster_size": int(self.cluster_size),
            "regular": bool(self.regular),
            "on_torus": bool(self.on_torus),
            "real_torus": bool(self.real_torus),
        }


def _relative_residual(sys: PolySystem, x: np.ndarray) -> float:
    F = sys.evaluate(x[None, :])[0]
    S = sys.term_scale(x[None, :])[0]
    return float(np.max(np.abs(F) / np.maximum(S, 1e-300)))


def _equilibrated_jacobian(sys: PolySystem, x: np.ndarray) -> np.ndarray:
    """Jacobian with rows divided by their term scale and torus columns multiplied by |x_i|.

    Torus columns become derivatives in log|x_i|, so the regularity test does
    not depend on the monomial used to clear each equation.
    """
    J = sys.jacobian(x[None, :])[0]
    rows = sys.term_scale(x[None, :])[0]
    rows = np.where(rows > 0, rows, 1.0)
    cols = np.array([abs(v) if flag and v != 0 else max(1.0, abs(v)) for v, flag in zip(x, sys.torus)])
    return J / rows[:, None] * cols[None, :]


def newton_refine(sys: PolySystem, point, max_iter: int = 50, tol: float = 1e-11) -> Solution:
    """Newton's method on an affine point; stops when the relative residual drops below tol."""
    x = np.array(point, dtype=complex)
    converged = False
    res = _relative_residual(sys, x)
    for _ in range(max_iter):
        if res < tol:
            converged = True
            break
        J = sys.jacobian(x[None, :])[0]
        F = sys.evaluate(x[None, :])[0]
        try:
            dx = np.linalg.lstsq(J, -F, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        xn = x + dx
        if not np.all(np.isfinite(xn)):
            break
        rn = _relative_residual(sys, xn)
        x, res = xn, rn
        if np.linalg.norm(dx) <= 1e-15 * max(1.0, np.linalg.norm(x)):
            converged = res < tol
            break
    else:
        converged = res < tol
    J = _equilibrated_jacobian(sys, x)
    if np.all(np.isfinite(J)):
        s = np.linalg.svd(J, compute_uv=False)
        smin, jn = float(s[-1]), float(s[0])
    else:
        smin, jn = 0.0, float("inf")
    return Solution(x, res, smin, jn, converged)


def classify(sol: Solution, sys: PolySystem, options: SolverOptions = SolverOptions()) -> Solution:
    x = sol.point
    sol.regular = bool(sol.converged and sol.jac_norm > 0 and sol.sigma_min > options.tol_regular * sol.jac_norm)
    mods = np.abs(x)
    tor = np.array(sys.torus)
    sol.on_torus = bool(np.all((mods[tor] >= options.torus_min) & (mods[tor] <= options.torus_max)))
    real = bool(np.all(np.abs(mods[tor] - 1) < options.real_tol))
    for v, flag in zip(x, sys.torus):
        if not flag:
            real &= abs(v.imag) < options.real_tol * (1 + abs(v))
    sol.real_torus = real and sol.on_torus
    return sol


def deduplicate(solutions: Sequence[Solution], rel_tol: float = 1e-6) -> list[Solution]:
    """Greedy clustering by relative distance; keeps the lowest-residual member."""
    order = sorted(range(len(solutions)), key=lambda i: solutions[i].residual)
    clusters: list[list[int]] = []
    reps: list[np.ndarray] = []
    for i in order:
        x = solutions[i].point
        for c, r in zip(clusters, reps):
            if np.linalg.norm(x - r) < rel_tol * max(1.0, np.linalg.norm(r)):
                c.append(i)
                break
        else:
            clusters.append([i])
            reps.append(x)
    out = []
    for c in clusters:
        rep = solutions[c[0]]
        ids = sorted(p for i in c for p in solutions[i].path_ids)
        merged = Solution(rep.point, rep.residual, rep.sigma_min, rep.jac_norm, rep.converged,
                          ids, sum(solutions[i].cluster_size for i in c), rep.regular, rep.on_torus, rep.real_torus)
        if merged.cluster_size > 1 and not merged.regular:
            merged.regular = False
        out.append(merged)
    return out


def canonical_sort(solutions: list[Solution]) -> list[Solution]:
    def key(s):
        return tuple(np.round(np.concatenate([s.point.real, s.point.imag]), 8))
    return sorted(solutions, key=key)


ENDPOINT_KINDS = ("torus_regular", "torus_singular", "off_torus", "infinity", "failed")


@dataclass
class SolveResult:
    system: PolySystem
    options: SolverOptions
    path_count: int
    status_counts: dict
    endpoint_counts: dict  # one entry per kind in ENDPOINT_KINDS, summing to path_count
    solutions: list[Solution]  # deduplicated finite endpoints
    retracked: int = 0

    @property
    def failed(self) -> int:
        return self.endpoint_counts["failed"]

    def torus_solutions(self) -> list[Solution]:
        return [s for s in self.solutions if s.on_torus]

    @property
    def regular_torus(self) -> list[Solution]:
        return [s for s in self.torus_solutions() if s.regular and s.cluster_size == 1]

    @property
    def singular_torus(self) -> list[Solution]:
        return [s for s in self.torus_solutions() if not (s.regular and s.cluster_size == 1)]

    def summary(self) -> dict:
        return {
            "paths": self.path_count,
            "tracking": dict(self.status_counts),
            "endpoints": dict(self.endpoint_counts),
            "retracked": self.retracked,
            "distinct_torus_solutions": len(self.torus_solutions()),
            "regular_torus_solutions": len(self.regular_torus),
        }


def _endpoint_kind(sol: Solution | None, status: str, val: np.ndarray, sys: PolySystem, opts: SolverOptions) -> str:
    if status == "failed":
        return "failed"
    if sol is None:
        return "infinity"
    if status == "tail":
        if np.any(np.isnan(val)):
            return "failed"
        torus = np.array(sys.torus)
        escaping = np.any(np.abs(val[torus]) > opts.valuation_tol) or np.any(val[~torus] < -opts.valuation_tol)
        # slowly escaping paths can show small slopes; they never reach a small residual
        escaping |= sol.residual > opts.singular_residual
        if escaping:
            return "infinity" if np.any(val[~torus] < 0) else "off_torus"
        if sol.converged and sol.regular:
            return "torus_regular" if sol.on_torus else "off_torus"
        return "torus_singular" if sol.on_torus else "off_torus"
    if not sol.converged:
        return "failed"
    if not sol.on_torus:
        return "off_torus"
    return "torus_regular" if sol.regular else "torus_singular"


def _endpoints(paths: PathResult, sys: PolySystem, opts: SolverOptions) -> tuple[list[Solution], list[str]]:
    sols, kinds = [], []
    for k, X in enumerate(paths.endpoints):
        status = paths.status[k]
        sol = None
        if status != "failed":
            x0 = X[0]
            nrm = np.linalg.norm(X[1:])
            if np.isfinite(nrm) and abs(x0) * opts.divergence_bound > nrm:
                x = X[1:] / x0
                sol = newton_refine(sys, x, opts.refine_iters, opts.refine_tol)
                if np.linalg.norm(sol.point - x) > opts.max_refine_move * max(1.0, np.linalg.norm(x)):
                    # Newton left the basin of the tracked endpoint; keep the endpoint as is
                    sol = newton_refine(sys, x, 0, opts.refine_tol)
                sol.path_ids = [k]
                sol = classify(sol, sys, opts)
        kind = _endpoint_kind(sol, status, paths.valuations[k], sys, opts)
        kinds.append(kind)
        if kind in ("torus_regular", "torus_singular"):
            if kind == "torus_singular":
                sol.regular = False
            sols.append(sol)
    return sols, kinds


def solve(sys: PolySystem, options: SolverOptions = SolverOptions()) -> SolveResult:
    """Track every total-degree path, refine, classify and deduplicate the endpoints."""
    opts = options
    start = total_degree_start(sys, opts.gamma_seed)
    paths = track(start, sys, opts)
    retracked = 0
    if opts.retrack:
        # two paths reaching the same regular root means one of them jumped
        sols, kinds = _endpoints(paths, sys, opts)
        clustered = deduplicate([s for s in sols if s.regular], opts.tol_dedup)
        again = {p for c in clustered if c.cluster_size > 1 for p in c.path_ids}
        again |= {i for i, kd in enumerate(kinds) if kd == "failed"}
        again = sorted(again)
        if again:
            retracked = len(again)
            finer = SolverOptions(**{**opts.to_dict(), "max_step": opts.max_step / 10})
            redo = track(start, sys, finer, np.array(again))
            for j, i in enumerate(again):
                paths.endpoints[i] = redo.endpoints[j]
                paths.status[i] = redo.status[j]
                paths.t[i] = redo.t[j]
                paths.valuations[i] = redo.valuations[j]
    sols, kinds = _endpoints(paths, sys, opts)
    status_counts = {s: int(np.sum(paths.status == s)) for s in ("done", "tail", "failed")}
    endpoint_counts = {k: kinds.count(k) for k in ENDPOINT_KINDS}
    deduped = canonical_sort(deduplicate(sols, opts.tol_dedup))
    return SolveResult(sys, opts, start.path_count, status_counts, endpoint_counts, deduped, retracked)

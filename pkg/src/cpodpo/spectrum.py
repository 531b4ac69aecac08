"""Band functions over the compact torus and their real critical points."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .floquet import dispersion, floquet_matrix
from .graph import Parameters, PeriodicGraph, ParameterError
from .laurent import LaurentPoly

DEFAULT_GRID = {1: 256, 2: 64, 3: 24}


def eigvals_hermitian(M, tol: float = 1e-10) -> np.ndarray:
    """Sorted eigenvalues of a Hermitian matrix (or a stack of them)."""
    M = np.asarray(M, dtype=complex)
    dev = np.max(np.abs(M - np.conj(np.swapaxes(M, -1, -2)))) if M.size else 0.0
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if dev > tol * scale:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.2e})")
    return np.linalg.eigvalsh(M)


@dataclass
class BandGrid:
    N: int
    dim: int
    thetas: np.ndarray  # (N^d, d)
    values: np.ndarray  # (N^d, m), sorted along the last axis

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def bands(self) -> list[tuple[float, float]]:
        return [(float(self.values[:, j].min()), float(self.values[:, j].max())) for j in range(self.m)]

    def band_array(self, j: int) -> np.ndarray:
        return self.values[:, j].reshape((self.N,) * self.dim)

    def continuity_constant(self) -> float:
        """max |band jump between grid neighbours| * N, a sanity monitor."""
        worst = 0.0
        for j in range(self.m):
            a = self.band_array(j)
            for ax in range(self.dim):
                worst = max(worst, float(np.max(np.abs(np.roll(a, -1, axis=ax) - a))))
        return worst * self.N

    def to_csv(self) -> str:
        head = [f"theta{i + 1}" for i in range(self.dim)] + [f"lambda{j + 1}" for j in range(self.m)]
        lines = [",".join(head)]
        for th, vals in zip(self.thetas, self.values):
            lines.append(",".join(f"{x:.12g}" for x in list(th) + list(vals)))
        return "\n".join(lines) + "\n"


def torus_grid(d: int, N: int) -> np.ndarray:
    ticks = 2 * np.pi * np.arange(N) / N
    mesh = np.meshgrid(*([ticks] * d), indexing="ij")
    return np.stack([x.ravel() for x in mesh], axis=1)


def band_functions(g: PeriodicGraph, c: Parameters, N: int | None = None) -> BandGrid:
    if not c.is_real:
        raise ParameterError("band functions need real parameters")
    N = N or DEFAULT_GRID[g.dimension]
    th = torus_grid(g.dimension, N)
    L = floquet_matrix(g, c).evaluator()(np.exp(1j * th))
    return BandGrid(N, g.dimension, th, eigvals_hermitian(L))


def dispersion_residual(grid: BandGrid, D: LaurentPoly) -> float:
    """Largest |D(z, lambda_j(z))| relative to the term scale over the grid."""
    f = D.to_complex().compile()
    absD = LaurentPoly(D.dim, {e: abs(complex(c)) for e, c in D.items()}).compile()
    z = np.exp(1j * grid.thetas)
    worst = 0.0
    for j in range(grid.m):
        lam = grid.values[:, j]
        pts = np.concatenate([z, lam[:, None]], axis=1)
        apts = np.concatenate([np.ones_like(z, dtype=complex), np.abs(lam)[:, None]], axis=1)
        worst = max(worst, float(np.max(np.abs(f(pts)) / np.maximum(np.abs(absD(apts)), 1e-300))))
    return worst


@dataclass
class RealCriticalPoint:
    band: int
    theta: np.ndarray
    value: float
    kind: str  # min, max, saddle, degenerate, singular, degenerate-flat
    refined: bool
    hessian: np.ndarray | None = None
    matched: bool | None = None

    def to_dict(self) -> dict:
        return {
            "band": self.band + 1,
            "theta": [float(x) for x in self.theta],
            "value": float(self.value),
            "type": self.kind,
            "refined": self.refined,
            "hessian_theta": None if self.hessian is None else np.real(self.hessian).tolist(),
            "matched_complex_solution": self.matched,
        }


class _AngleSystem:
    """D and its angle derivatives; on the real torus with real labels both are real."""

    def __init__(self, D: LaurentPoly):
        d = D.dim
        Dc = D.to_complex()
        self.d = d
        self.D = Dc.compile()
        self.Dl = Dc.lambda_derivative().compile()
        self.T = [Dc.toric_derivative(i) for i in range(d)]
        self.Tc = [t.compile() for t in self.T]
        self.TT = [[self.T[i].toric_derivative(j).compile() for j in range(d)] for i in range(d)]
        self.Tl = [t.lambda_derivative().compile() for t in self.T]

    def _pt(self, theta, lam):
        return np.concatenate([np.exp(1j * np.asarray(theta)), [lam]])[None, :]

    def residual(self, theta, lam) -> np.ndarray:
        p = self._pt(theta, lam)
        return np.real(np.array([self.D(p)[0]] + [1j * t(p)[0] for t in self.Tc]))

    def jacobian(self, theta, lam) -> np.ndarray:
        p = self._pt(theta, lam)
        d = self.d
        J = np.empty((d + 1, d + 1))
        J[0, :d] = np.real([1j * t(p)[0] for t in self.Tc])
        J[0, d] = np.real(self.Dl(p)[0])
        for i in range(d):
            J[i + 1, :d] = np.real([-self.TT[i][j](p)[0] for j in range(d)])
            J[i + 1, d] = np.real(1j * self.Tl[i](p)[0])
        return J

    def band_hessian(self, theta, lam):
        """Hessian of the band function in theta at a critical point."""
        p = self._pt(theta, lam)
        Dl = self.Dl(p)[0]
        H = np.array([[self.TT[i][j](p)[0] for j in range(self.d)] for i in range(self.d)]) / Dl
        return np.real(H), abs(Dl)


def _grid_candidates(grid: BandGrid, j: int) -> list[tuple[int, ...]]:
    """Grid-local minima and maxima, plus local minima of the discrete gradient norm."""
    a = grid.band_array(j)
    d = grid.dim
    shifts = [s for s in product((-1, 0, 1), repeat=d) if any(s)]
    nb = np.stack([np.roll(a, s, axis=tuple(range(d))) for s in shifts])
    is_min = np.all(a[None] < nb, axis=0)
    is_max = np.all(a[None] > nb, axis=0)
    grad = sum((np.roll(a, -1, axis=ax) - np.roll(a, 1, axis=ax)) ** 2 for ax in range(d))
    gnb = np.stack([np.roll(grad, s, axis=tuple(range(d))) for s in shifts])
    is_flat = np.all(grad[None] <= gnb, axis=0)
    mask = is_min | is_max | is_flat
    return [tuple(int(x) for x in idx) for idx in np.argwhere(mask)]


def real_extrema(g: PeriodicGraph, c: Parameters, grid: BandGrid, D: LaurentPoly | None = None,
                 newton_iters: int = 40, tol: float = 1e-12, dedup: float = 1e-7) -> list[RealCriticalPoint]:
    """Real critical points of each band function, refined by Newton's method in angle coordinates."""
    D = D if D is not None else dispersion(g, c)
    sysm = _AngleSystem(D)
    d = grid.dim
    L = floquet_matrix(g, c).evaluator()
    out: list[RealCriticalPoint] = []
    scale = max(1.0, float(np.max(np.abs(grid.values))))
    for j in range(grid.m):
        lo, hi = grid.bands[j]
        if hi - lo <= 1e-12 * scale:
            out.append(RealCriticalPoint(j, np.zeros(d), lo, "degenerate-flat", False))
            continue
        found: list[RealCriticalPoint] = []
        for idx in _grid_candidates(grid, j):
            theta = 2 * np.pi * np.array(idx) / grid.N
            lam = float(grid.band_array(j)[idx])
            ok = False
            for _ in range(newton_iters):
                F = sysm.residual(theta, lam)
                J = sysm.jacobian(theta, lam)
                try:
                    step = np.linalg.solve(J, -F)
                except np.linalg.LinAlgError:
                    break
                # keep each step within one grid cell so the iteration stays near its seed
                lim = 2 * np.pi / grid.N
                big = np.max(np.abs(step[:d])) if d else 0.0
                if big > lim:
                    step = step * (lim / big)
                theta = theta + step[:d]
                lam = lam + step[d]
                if np.max(np.abs(step)) < tol * max(1.0, abs(lam)):
                    ok = True
                    break
            if not ok:
                continue
            theta = np.mod(theta, 2 * np.pi)
            theta[theta > 2 * np.pi - 1e-12] = 0.0
            ev = eigvals_hermitian(L(np.exp(1j * theta)[None, :])[0])
            band = int(np.argmin(np.abs(ev - lam)))
            if band != j:
                continue
            if any(np.max(np.abs(np.angle(np.exp(1j * (theta - p.theta))))) < dedup for p in found):
                continue
            H, dl = sysm.band_hessian(theta, lam)
            if dl <= 1e-10 * scale ** max(1, grid.m - 1):
                kind = "singular"
            else:
                w = np.linalg.eigvalsh((H + H.T) / 2)
                hs = max(1.0, float(np.max(np.abs(w))))
                if np.min(np.abs(w)) < 1e-8 * hs:
                    kind = "degenerate"
                elif np.all(w > 0):
                    kind = "min"
                elif np.all(w < 0):
                    kind = "max"
                else:
                    kind = "saddle"
            found.append(RealCriticalPoint(j, theta, float(lam), kind, True, H))
        found.sort(key=lambda p: (p.value, tuple(p.theta)))
        out.extend(found)
    return out


def spectral_edges(grid: BandGrid) -> list[float]:
    return [x for b in grid.bands for x in b]


def edges_covered(points: list[RealCriticalPoint], grid: BandGrid, rel: float = 1e-3) -> bool:
    """Every grid band minimum/maximum is close to (and no better than) a refined extremum."""
    for j, (lo, hi) in enumerate(grid.bands):
        mins = [p.value for p in points if p.band == j and p.kind == "min"]
        maxs = [p.value for p in points if p.band == j and p.kind == "max"]
        tol = rel * max(1.0, abs(hi - lo))
        if not mins or min(mins) > lo + tol or not maxs or max(maxs) < hi - tol:
            if not any(p.kind == "degenerate-flat" and p.band == j for p in points):
                return False
    return True


def match_to_solutions(points: list[RealCriticalPoint], solutions: list[dict], tol: float = 1e-6) -> int:
    """Mark each refined point matched when a real-torus solution agrees within tol; returns the count."""
    cands = []
    for s in solutions:
        if not s.get("real_torus"):
            continue
        pt = s["point"]
        keys = [k for k in pt if k != "lam"]
        z = np.array([complex(*pt[k]) for k in keys])
        cands.append((z, complex(*pt["lam"])))
    n = 0
    for p in points:
        if not p.refined:
            continue
        z = np.exp(1j * p.theta)
        p.matched = any(np.max(np.abs(z - zz)) < tol and abs(p.value - ll) < tol * (1 + abs(ll))
                        for zz, ll in cands)
        n += bool(p.matched)
    return n


@dataclass
class SpectrumSummary:
    grid: BandGrid
    points: list[RealCriticalPoint] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.N,
            "bands": [list(b) for b in self.grid.bands],
            "continuity_constant": self.grid.continuity_constant(),
            "critical_points": [p.to_dict() for p in self.points],
        }

"""Critical points of the band functions: the system {D, z_i dD/dz_i}, its solutions,
Hessian data at each solution, and the facial-system audit at infinity."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from . import lattice
from .floquet import dispersion
from .graph import Parameters, PeriodicGraph
from .laurent import LaurentPoly
from .polytope import (Face, NewtonPolytope, faces as polytope_faces, generic_newton_polytope,
                       kushnirenko_bound, newton_polytope, predicted_polytope, theorem_a_bound)
from .solver import (PolySystem, SegmentHomotopy, Solution, SolverOptions, classify, deduplicate,
                     monodromy_complete, newton_refine, solve)

log = logging.getLogger(__name__)

ATTAINED = "BOUND_ATTAINED_ALL_REGULAR"
NOT_ATTAINED = "BOUND_NOT_ATTAINED"
SINGULAR = "SINGULAR_PRESENT"
INCONCLUSIVE = "INCONCLUSIVE"

NO_SOLUTIONS = "NO_SOLUTIONS"
SOLUTIONS_FOUND = "SOLUTIONS_FOUND"


@dataclass(frozen=True)
class CriticalOptions:
    solver: SolverOptions = SolverOptions()
    tol_residual: float = 1e-9
    tol_nondegenerate: float = 1e-8
    fd_step: float = 1e-4
    skip_faces: bool = False
    monodromy: bool = True
    monodromy_seed: int = 0
    face_seed: int = 1

    def to_dict(self) -> dict:
        out = asdict(self)
        out["solver"] = self.solver.to_dict()
        return out


# the system -----------------------------------------------------------------

def cpe_equations(D: LaurentPoly) -> list[LaurentPoly]:
    """[D, z_1 dD/dz_1, ..., z_d dD/dz_d] as Laurent polynomials."""
    if not D:
        raise ValueError("critical point equations of the zero polynomial")
    return [D] + [D.toric_derivative(i) for i in range(D.dim)]


def cpe_system(D: LaurentPoly) -> PolySystem:
    """The cleared system in (z_1..z_d, lam); z flagged as torus variables, lam unrestricted.

    A lambda-free D gives a system in which lam is a free parameter; the
    returned system carries ``degenerate = True`` in that case.
    """
    eqs = [p.to_complex() for p in cpe_equations(D)]
    names = [f"z{i + 1}" for i in range(D.dim)] + ["lam"]
    sys = PolySystem.from_laurent(eqs, names=names)
    sys.degenerate = D.lambda_degree() <= 0
    return sys


def laurent_residual(eqs: Sequence[LaurentPoly], z, lam) -> float:
    """max_i |f_i| / sum |terms of f_i| at the point, on the uncleared equations."""
    z = np.asarray(z, dtype=complex)
    worst = 0.0
    for p in eqs:
        val, scale = 0j, 0.0
        for e, c in p.items():
            t = complex(c) * complex(np.prod(z ** np.array(e[:-1]))) * complex(lam) ** e[-1]
            val += t
            scale += abs(t)
        if scale > 0:
            worst = max(worst, abs(val) / scale)
    return worst


# Hessian data ------------------------------------------------------------------

@dataclass
class HessianCheck:
    hessian_det: complex | None
    hessian_theta_det: complex | None
    jacobian_det: complex
    d_lambda: complex
    nondegenerate: bool | None
    identity_error: float | None
    singular_point: bool

    def to_dict(self) -> dict:
        def c(x):
            return None if x is None else [float(np.real(x)), float(np.imag(x))]
        return {
            "hessian_det": c(self.hessian_det),
            "hessian_theta_det": c(self.hessian_theta_det),
            "jacobian_det": c(self.jacobian_det),
            "d_lambda": c(self.d_lambda),
            "nondegenerate": self.nondegenerate,
            "identity_error": self.identity_error,
            "singular_bloch_point": self.singular_point,
        }


def _eval(p: LaurentPoly, z, lam) -> complex:
    return complex(p.evaluate(z, lam))


def gradient_jacobian(D: LaurentPoly, z, lam) -> np.ndarray:
    """Jacobian of (D, dD/dz_1, ..., dD/dz_d) with columns ordered (lam, z_1, ..., z_d)."""
    d = D.dim
    rows = [D] + [D.partial_z(i) for i in range(d)]
    J = np.empty((d + 1, d + 1), dtype=complex)
    for r, f in enumerate(rows):
        J[r, 0] = _eval(f.lambda_derivative(), z, lam)
        for j in range(d):
            J[r, j + 1] = _eval(f.partial_z(j), z, lam)
    return J


def implicit_hessian(D: LaurentPoly, z, lam) -> np.ndarray:
    """Second derivatives of the implicit function lam(z) cut out by D = 0."""
    d = D.dim
    Dl = _eval(D.lambda_derivative(), z, lam)
    Dll = _eval(D.lambda_derivative().lambda_derivative(), z, lam)
    Di = np.array([_eval(D.partial_z(i), z, lam) for i in range(d)])
    Dil = np.array([_eval(D.partial_z(i).lambda_derivative(), z, lam) for i in range(d)])
    li = -Di / Dl
    H = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            Dij = _eval(D.partial_z(i).partial_z(j), z, lam)
            H[i, j] = -(Dij + Dil[i] * li[j] + Dil[j] * li[i] + Dll * li[i] * li[j]) / Dl
    return H


def hessian_check(D: LaurentPoly, sol, tol: float = 1e-8) -> HessianCheck:
    """Hessian of lam at a critical point, via det J = (-1)^d (dD/dlam)^(d+1) det Hess.

    J is the Jacobian of (D, grad_z D) with lam ordered first. The Hessian is
    in the z coordinates; the angle-coordinate Hessian (z = exp(i theta)) is
    -diag(z) Hess diag(z) at a critical point and is reported as well.
    Nondegeneracy compares |det Hess| with the product of its row norms, so
    the test does not depend on how the parameters are scaled.
    """
    z, lam = _split(sol)
    d = D.dim
    Dc = D.to_complex()
    J = gradient_jacobian(Dc, z, lam)
    detJ = complex(np.linalg.det(J))
    Dl = J[0, 0]
    scale = max(Dc.coefficient_scale(), 1e-300)
    if abs(Dl) <= 1e-12 * scale:
        return HessianCheck(None, None, detJ, Dl, None, None, True)
    detH = detJ * (-1) ** d / Dl ** (d + 1)
    H = implicit_hessian(Dc, z, lam)
    direct = complex(np.linalg.det(H))
    identity_error = abs(detH - direct) / max(abs(direct), abs(detH), 1e-300)
    rows = np.prod(np.linalg.norm(H, axis=1))
    nondeg = bool(rows > 0 and abs(direct) > tol * rows)
    theta = (-1) ** d * complex(np.prod(np.asarray(z) ** 2)) * direct
    return HessianCheck(direct, theta, detJ, Dl, nondeg, float(identity_error), False)


def _split(sol):
    if isinstance(sol, Solution):
        pt = sol.point
    else:
        pt = np.asarray(sol, dtype=complex)
    return pt[:-1], complex(pt[-1])


def lambda_near(D: LaurentPoly, z, lam0: complex, iters: int = 30) -> complex:
    """Root of D(z, .) closest to lam0 by Newton's method in lam."""
    Dl = D.lambda_derivative()
    lam = complex(lam0)
    for _ in range(iters):
        f = _eval(D, z, lam)
        g = _eval(Dl, z, lam)
        if g == 0:
            break
        step = f / g
        lam -= step
        if abs(step) < 1e-15 * max(1.0, abs(lam)):
            break
    return lam


def finite_difference_hessian(D: LaurentPoly, z, lam, h: float = 1e-4, angles: bool = False) -> np.ndarray:
    """Central second differences of lam(z), or of lam(theta) with z = exp(i theta)."""
    Dc = D.to_complex()
    z = np.asarray(z, dtype=complex)
    d = len(z)
    base = np.log(z) / 1j if angles else z.copy()

    def f(x):
        pt = np.exp(1j * x) if angles else x
        return lambda_near(Dc, pt, lam)

    H = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(i, d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = h
            ej[j] = h
            if i == j:
                H[i, i] = (f(base + ei) - 2 * f(base) + f(base - ei)) / h ** 2
            else:
                H[i, j] = H[j, i] = (f(base + ei + ej) - f(base + ei - ej) - f(base - ei + ej)
                                     + f(base - ei - ej)) / (4 * h * h)
    return H


# facial systems ----------------------------------------------------------------

@dataclass
class FacialSystem:
    face: Face
    basis: list
    equations: list  # LaurentPoly in k variables (lambda slot unused), possibly empty
    system: PolySystem | None
    trivial: str | None = None  # reason the system is trivially inconsistent

    @property
    def k(self) -> int:
        return len(self.basis)


def _coordinates(basis: list[list[int]], v: Sequence[int]) -> tuple[int, ...]:
    """Integer coordinates of v in an echelon lattice basis."""
    v = list(v)
    out = []
    for row in basis:
        piv = next(i for i, x in enumerate(row) if x)
        q, r = divmod(v[piv], row[piv])
        if r:
            raise ValueError("point not in the lattice spanned by the face")
        out.append(q)
        v = [a - q * b for a, b in zip(v, row)]
    if any(v):
        raise ValueError("point not in the lattice spanned by the face")
    return tuple(out)


def facial_system(D: LaurentPoly, F: Face) -> FacialSystem:
    """Facial forms of the critical point equations in k coordinates on the face."""
    if F.is_base:
        raise ValueError("the base face is excluded from the audit")
    pts = sorted(F.points)
    p0 = pts[0]
    basis = lattice.hermite_rows(lattice.difference_rows(pts)) if len(pts) > 1 else []
    k = len(basis)
    coords = {p: _coordinates(basis, [a - b for a, b in zip(p, p0)]) for p in pts}
    restricted = D.facial_form(pts)
    forms = [restricted] + [restricted.toric_derivative(i) for i in range(D.dim)]
    if k == 0:
        reason = "nonzero monomial on the torus" if restricted else None
        return FacialSystem(F, basis, [], None, reason)
    eqs = [LaurentPoly(k, {coords[e] + (0,): c for e, c in f.items()}) for f in forms]
    eqs = [q for q in eqs if q]
    if any(len(q) == 1 for q in eqs):
        return FacialSystem(F, basis, eqs, None, "nonzero monomial on the torus")
    names = [f"y{i + 1}" for i in range(k)]
    sys = PolySystem.from_laurent([q.to_complex() for q in eqs], use_lambda=False, names=names)
    return FacialSystem(F, basis, eqs, sys, None)


@dataclass
class FaceVerdict:
    face: Face
    verdict: str
    witnesses: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "normal": list(self.face.normal),
            "height": self.face.height,
            "dim": self.face.dim,
            "vertical": self.face.is_vertical,
            "base": self.face.is_base,
            "lattice_points": len(self.face.points),
            "verdict": self.verdict,
            "witnesses": [[[float(v.real), float(v.imag)] for v in w] for w in self.witnesses],
            "note": self.note,
        }


def _square_draw(fs: FacialSystem, rng: np.random.Generator, opts: SolverOptions):
    """Roots of k random combinations that satisfy every facial equation."""
    k = fs.k
    S = fs.system
    combos = []
    for _ in range(k):
        w = rng.normal(size=len(S.polys)) + 1j * rng.normal(size=len(S.polys))
        rows, coeffs = [], []
        for (e, c), wi in zip(S.polys, w):
            rows.append(e)
            coeffs.append(wi * c / max(np.max(np.abs(c)), 1e-300))
        E = np.concatenate(rows)
        C = np.concatenate(coeffs)
        uniq, inv = np.unique(E, axis=0, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=complex)
        np.add.at(acc, inv.ravel(), C)
        keep = np.abs(acc) > 0
        combos.append((uniq[keep], acc[keep]))
    sq = PolySystem(combos, (True,) * k, S.names)
    if any(d < 1 for d in sq.degrees):
        return None
    res = solve(sq, SolverOptions(**{**opts.to_dict(), "gamma_seed": int(rng.integers(2**31)), "retrack": True}))
    wits = []
    for sol in res.solutions:
        if not sol.on_torus:
            continue
        ref = newton_refine(S, sol.point, opts.refine_iters, opts.refine_tol)
        if ref.residual < 1e-9 and np.linalg.norm(ref.point - sol.point) < 1e-4 * max(1, np.linalg.norm(sol.point)):
            wits.append(classify(ref, S, opts))
    return deduplicate(wits, opts.tol_dedup), res


def check_face_smooth(D: LaurentPoly, F: Face, options: SolverOptions = SolverOptions(), seed: int = 1,
                      max_draws: int = 4) -> FaceVerdict:
    """Emptiness test of the facial system with two independent randomizations."""
    fs = facial_system(D, F)
    if fs.trivial:
        return FaceVerdict(F, NO_SOLUTIONS, [], fs.trivial)
    if fs.system is None or len(fs.system.polys) < fs.k:
        return FaceVerdict(F, INCONCLUSIVE, [], "underdetermined facial system")
    rng = np.random.default_rng(seed)
    # a draw that found nothing but lost paths proves nothing, so it is replaced (a few times at most)
    clean, lossy = [], []
    for _ in range(max_draws):
        out = _square_draw(fs, rng, options)
        if out is None:
            return FaceVerdict(F, INCONCLUSIVE, [], "degenerate random combination")
        (lossy if out[1].failed and not out[0] else clean).append(out)
        if len(clean) == 2:
            break
    (w1, r1), (w2, r2) = (clean + lossy)[:2]
    if bool(w1) != bool(w2):
        return FaceVerdict(F, INCONCLUSIVE, [], "randomizations disagree")
    if r1.failed or r2.failed:
        if not w1:
            return FaceVerdict(F, INCONCLUSIVE, [], "path failures in the square subsystem")
    if not w1:
        return FaceVerdict(F, NO_SOLUTIONS, [], "")
    note = "" if len(w1) == len(w2) else f"witness counts differ between draws ({len(w1)} vs {len(w2)})"
    return FaceVerdict(F, SOLUTIONS_FOUND, [w.point for w in w1], note)


def face_audit(D: LaurentPoly, P: NewtonPolytope | None = None, options: SolverOptions = SolverOptions(),
               seed: int = 1) -> list[FaceVerdict]:
    P = P or newton_polytope(D)
    out = []
    for F in sorted(polytope_faces(P), key=lambda f: (f.dim, f.normal, f.height)):
        if F.is_base:
            out.append(FaceVerdict(F, "SKIPPED_BASE"))
            continue
        out.append(check_face_smooth(D, F, options, seed))
    return out


# the pipeline -------------------------------------------------------------------

def _param_vector(c: Parameters) -> np.ndarray:
    return np.array([complex(x) for x in c.weights + c.potentials])


def _params_from_vector(v: np.ndarray, nw: int) -> Parameters:
    v = [complex(x) for x in v]
    return Parameters(tuple(v[:nw]), tuple(v[nw:]), "complex")


class ParameterFamily:
    """Critical point systems of a fixed graph along straight segments in parameter space."""

    def __init__(self, g: PeriodicGraph, base: Parameters, shifts):
        self.g = g
        self.nw = len(g.edges)
        self.base = _param_vector(base)
        self.shifts = shifts
        self.scale = float(np.sqrt(np.mean(np.abs(self.base) ** 2)))

    def segment(self, pa: np.ndarray, pb: np.ndarray) -> SegmentHomotopy:
        K = self.g.m + 1
        nodes = np.exp(2j * np.pi * np.arange(K) / K)
        samples = [dispersion(self.g, _params_from_vector((1 - t) * pa + t * pb, self.nw)) for t in nodes]
        systems = []
        for k in range(K):
            Pk = LaurentPoly.zero(self.g.dimension)
            for t, Dt in zip(nodes, samples):
                Pk = Pk + Dt * complex(t ** (-k) / K)
            eqs = [Pk] + [Pk.toric_derivative(i) for i in range(self.g.dimension)]
            systems.append(PolySystem.from_laurent(eqs, shifts=self.shifts))
        return SegmentHomotopy(systems)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        n = len(self.base)
        return self.scale * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)


def _generic_shifts(g: PeriodicGraph) -> list[tuple[int, ...]]:
    """Clearing shifts valid for every parameter value: supports lie in m Q."""
    pts = predicted_polytope(g).points
    d = g.dimension
    s = tuple(max(0, -min(p[i] for p in pts)) for i in range(d))
    return [s] * (d + 1)


def substitute_signs(D: LaurentPoly, fixed: dict[int, int]) -> LaurentPoly:
    """D with z_i replaced by the sign fixed[i]; the remaining z keep their order."""
    keep = [i for i in range(D.dim) if i not in fixed]
    terms: dict = {}
    for e, c in D.items():
        sign = 1
        for i, v in fixed.items():
            if v < 0 and e[i] % 2:
                sign = -sign
        key = tuple(e[i] for i in keep) + (e[-1],)
        terms[key] = terms.get(key, 0) + sign * c
    return LaurentPoly(len(keep), terms)


def symmetric_strata(D: LaurentPoly, options: SolverOptions = SolverOptions()) -> list[np.ndarray]:
    """Critical points with some z_i = +-1, solved stratum by stratum.

    D(z, lam) is invariant under z_i -> 1/z_i for every parameter value, so
    z_i dD/dz_i vanishes identically on z_i = +-1 and these strata carry
    critical points that parameter loops cannot reach from generic ones.
    """
    d = D.dim
    out = []
    for mask in product((None, 1, -1), repeat=d):
        fixed = {i: v for i, v in enumerate(mask) if v is not None}
        if not fixed:
            continue
        sub = substitute_signs(D, fixed)
        if not sub:
            continue
        keep = [i for i in range(d) if i not in fixed]
        if not keep:
            coeffs = [complex(sub.coeff((j,))) for j in range(sub.lambda_degree() + 1)]
            lams = np.roots(coeffs[::-1]) if len(coeffs) > 1 else []
            for lam in lams:
                out.append(np.array([complex(v) for v in mask] + [lam]))
            continue
        res = solve(cpe_system(sub), options)
        for sol in res.regular_torus:
            pt = np.empty(d + 1, dtype=complex)
            pt[keep] = sol.point[:-1]
            for i, v in fixed.items():
                pt[i] = v
            pt[-1] = sol.point[-1]
            out.append(pt)
    return out


@dataclass
class CriticalPointReport:
    dimension: int
    lambda_degree: int
    support_size: int
    theorem_a_bound: int | None
    kushnirenko_bound: int
    options: CriticalOptions
    lambda_scale: float
    solutions: list[dict]
    regular: int
    singular_clusters: int
    singular_members: int
    real_torus: int
    path_summary: dict
    monodromy: dict | None
    faces: list[FaceVerdict] | None
    verdict: str
    residual_max: float
    hessian_consistent: bool
    notes: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.regular + self.singular_clusters

    def to_dict(self) -> dict:
        return {
            "dispersion": {"dimension": self.dimension, "lambda_degree": self.lambda_degree,
                           "support_size": self.support_size},
            "bounds": {"theorem_a_bound": self.theorem_a_bound, "kushnirenko_bound": self.kushnirenko_bound},
            "options": self.options.to_dict(),
            "lambda_scale": self.lambda_scale,
            "counts": {"total_torus": self.total, "regular": self.regular,
                       "singular_clusters": self.singular_clusters, "singular_members": self.singular_members,
                       "real_torus": self.real_torus},
            "paths": self.path_summary,
            "monodromy": self.monodromy,
            "max_residual": self.residual_max,
            "hessian_consistent": self.hessian_consistent,
            "faces": None if self.faces is None else [f.to_dict() for f in self.faces],
            "verdict": self.verdict,
            "notes": list(self.notes),
            "solutions": self.solutions,
        }


def _lambda_scale(c: Parameters):
    s = max(abs(x) for x in c.weights + c.potentials) if (c.weights or c.potentials) else 1
    if s == 0:
        s = 1
    return s


def solve_cpe(g: PeriodicGraph, c: Parameters, options: CriticalOptions = CriticalOptions(),
              D: LaurentPoly | None = None) -> CriticalPointReport:
    """Dispersion, critical point equations, solve, classify, Hessian data, bounds and verdict."""
    opts = options
    D = D if D is not None else dispersion(g, c)
    kb = kushnirenko_bound(D)
    ta = theorem_a_bound(g)
    # solve in lam = s * mu with s the parameter magnitude; roots then have |mu| of order one
    s = _lambda_scale(c)
    cs = c.scaled(Fraction(1) / s if isinstance(s, Fraction) else 1.0 / s)
    Ds = dispersion(g, cs)
    S = cpe_system(Ds)
    res = solve(S, opts.solver)
    regular = [x for x in res.regular_torus]
    singular = res.singular_torus
    mono = None
    points = [x.point for x in regular]
    if opts.monodromy and len(regular) < kb and regular:
        strata = symmetric_strata(Ds.to_complex(), opts.solver)
        pool = points + strata
        # D(1/z, lam) = D(z, lam) for every parameter value: the inversion maps
        # critical points to critical points (and conjugation does for real labels)
        pool = pool + [np.r_[1 / p[:-1], p[-1]] for p in pool]
        if c.is_real:
            pool = pool + [np.conj(p) for p in pool]
        cands = []
        for p in pool:
            sol = classify(newton_refine(S, p, opts.solver.refine_iters, opts.solver.refine_tol), S, opts.solver)
            if sol.converged and sol.regular and sol.on_torus:
                cands.append(sol)
        seeds = [x.point for x in deduplicate(cands, opts.solver.tol_dedup)]
        fam = ParameterFamily(g, cs, _generic_shifts(g))
        points, mlog = monodromy_complete(fam.segment, fam.base, fam.sample, S, seeds, kb, opts.solver,
                                          seed=opts.monodromy_seed)
        mono = mlog.to_dict()
        mono["seeded_from_total_degree"] = len(regular)
        mono["seeds_after_symmetry"] = len(seeds)
        regular = [classify(newton_refine(S, p, opts.solver.refine_iters, opts.solver.refine_tol), S, opts.solver)
                   for p in points]
        regular = [x for x in deduplicate(regular, opts.solver.tol_dedup) if x.regular and x.on_torus]
        # a singular cluster sitting on a point monodromy found regular was a tracking artifact
        singular = [x for x in singular
                    if all(np.linalg.norm(x.point - r.point) > 1e-6 * max(1, np.linalg.norm(r.point))
                           for r in regular)]

    eqs = cpe_equations(D.to_complex())
    sfac = float(s)
    records, resid_max, consistent = [], 0.0, True
    n_real = 0
    for sol in sorted(regular + singular, key=lambda x: tuple(np.round(np.r_[x.point.real, x.point.imag], 8))):
        z = sol.point[:-1]
        lam = sol.point[-1] * sfac
        r = laurent_residual(eqs, z, lam)
        resid_max = max(resid_max, r)
        rec = sol.to_dict(S.names)
        rec["point"]["lam"] = [float(lam.real), float(lam.imag)]
        rec["residual_laurent"] = r
        if sol.real_torus:
            n_real += 1
        if sol.regular:
            hc = hessian_check(D, np.r_[z, lam], opts.tol_nondegenerate)
            rec["hessian"] = hc.to_dict()
            if hc.nondegenerate is not None and hc.nondegenerate != sol.regular:
                consistent = False
        records.append(rec)

    notes = []
    failed = res.failed
    n_reg, n_sing = len(regular), len(singular)
    if n_sing:
        verdict = SINGULAR
    elif n_reg == kb:
        verdict = ATTAINED
        if failed:
            notes.append(f"{failed} total-degree paths failed; the bound is attained by distinct regular solutions")
    elif failed:
        verdict = INCONCLUSIVE
    elif n_reg > kb:
        verdict = INCONCLUSIVE
        notes.append("more regular solutions than the bound: numerical duplicates suspected")
    else:
        verdict = NOT_ATTAINED
    if resid_max >= opts.tol_residual:
        notes.append(f"max residual {resid_max:.2e} exceeds {opts.tol_residual:.0e}")
        verdict = INCONCLUSIVE

    face_verdicts = None
    if not opts.skip_faces:
        face_verdicts = face_audit(Ds, newton_polytope(Ds), opts.solver, opts.face_seed)

    return CriticalPointReport(
        dimension=g.dimension,
        lambda_degree=D.lambda_degree(),
        support_size=len(D),
        theorem_a_bound=ta,
        kushnirenko_bound=kb,
        options=opts,
        lambda_scale=sfac,
        solutions=records,
        regular=n_reg,
        singular_clusters=n_sing,
        singular_members=sum(x.cluster_size for x in singular),
        real_torus=n_real,
        path_summary=res.summary(),
        monodromy=mono,
        faces=face_verdicts,
        verdict=verdict,
        residual_max=resid_max,
        hessian_consistent=consistent,
        notes=notes,
    )


def certify_cpp(report: CriticalPointReport, generic: NewtonPolytope | None = None, g: PeriodicGraph | None = None,
                seed: int = 0) -> str:
    """Critical points property certificate text from a completed report."""
    if generic is None and g is not None:
        generic = generic_newton_polytope(g, seed)
    N = generic.normalized_volume if generic is not None else None
    n = report.regular
    if report.verdict == INCONCLUSIVE:
        return "INCONCLUSIVE: " + ("; ".join(report.notes) or "path failures")
    if report.singular_clusters == 0 and N is not None and n == N:
        return (f"CPP-certified (numerical): single calculation with {N} regular solutions "
                f"(generic Newton polytope sampled with seed {seed})")
    if report.singular_clusters == 0 and n == report.kushnirenko_bound:
        return (f"bound attained for this parameter: {n} regular solutions; "
                f"generic Newton polytope volume {N} differs")
    target = N if N is not None else report.kushnirenko_bound
    parts = [f"deficit {target - n - report.singular_clusters}: {n} regular and "
             f"{report.singular_clusters} singular torus solutions against {target}"]
    if report.faces is not None:
        vert = [f for f in report.faces if f.face.is_vertical and not f.face.is_base]
        found = [f for f in report.faces if f.verdict == SOLUTIONS_FOUND]
        if vert:
            parts.append(f"{len([f for f in vert if f.face.dim == report.dimension])} vertical facets, "
                         f"{len(vert)} vertical faces in all")
        if found:
            parts.append(f"{len(found)} faces with facial-system solutions "
                         f"({sum(len(f.witnesses) for f in found)} witnesses)")
    return "; ".join(parts)

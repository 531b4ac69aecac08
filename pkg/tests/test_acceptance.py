"""Acceptance criteria 1-8, each at its stated tolerance; one PASS/FAIL line per criterion."""
from fractions import Fraction

import numpy as np
import pytest

from cpodpo.critical import ATTAINED, SOLUTIONS_FOUND, CriticalOptions, check_face_smooth, cpe_system, face_audit
from cpodpo.floquet import dispersion
from cpodpo.graph import Parameters, dense_graph, support
from cpodpo.polytope import (faces, generic_newton_polytope, kushnirenko_bound, newton_polytope,
                             predicted_polytope, theorem_a_bound)
from cpodpo.solver import solve
from cpodpo.spectrum import band_functions, match_to_solutions, real_extrema
from cpodpo.critical import finite_difference_hessian, hessian_check, solve_cpe

from conftest import ACCEPTANCE_LINES, RUN_SECONDS, graph, params_file, run


class Criterion:
    """Collects checks; prints and records one line, then fails the test if any check failed."""

    def __init__(self, number: int, title: str, instance: str | None = None):
        self.number, self.title, self.instance = number, title, instance
        self.failures: list[str] = []
        self.facts: list[str] = []

    def check(self, ok: bool, what: str):
        (self.facts if ok else self.failures).append(what)

    def finish(self):
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures) if self.failures else "; ".join(self.facts[-3:])
        name = self.title if self.instance is None else f"{self.title}, {self.instance}"
        line = f"criterion {self.number} ({name}): {status}: {detail}"
        ACCEPTANCE_LINES.append((self.number, self.title, self.instance, not self.failures, detail))
        print(line)
        assert not self.failures, line


def _points(rep):
    for s in rep.solutions:
        pt = s["point"]
        z = np.array([complex(*pt[k]) for k in pt if k != "lam"])
        yield z, complex(*pt["lam"]), s


def test_criterion_1_dense_dimer():
    cr = Criterion(1, "dense dimer")
    cr.check(theorem_a_bound(graph("dimer")) == 32, "theorem_a_bound 32")
    for seed in (1, 2, 3):
        _, _, rep = run("dimer", seed)
        secs = RUN_SECONDS[("dimer", seed, 0, False)]
        cr.check(rep.regular == 32, f"seed {seed}: {rep.regular} regular")
        cr.check(rep.singular_clusters == 0, f"seed {seed}: {rep.singular_clusters} singular")
        cr.check(rep.verdict == ATTAINED, f"seed {seed}: {rep.verdict}")
        cr.check(secs < 30, f"seed {seed}: {secs:.1f} s")
    cr.finish()


def test_criterion_2_dense_wide():
    cr = Criterion(2, "wide dense graph")
    g = graph("dense_wide")
    cr.check(generic_newton_polytope(g, 0).normalized_volume == 64, "N(G) normalized volume 64")
    for seed in (1, 2):
        _, _, rep = run("dense_wide", seed)
        secs = RUN_SECONDS[("dense_wide", seed, 0, False)]
        cr.check(rep.regular == 64, f"seed {seed}: {rep.regular} regular")
        cr.check(secs < 120, f"seed {seed}: {secs:.1f} s")
    cr.finish()


def test_criterion_3_sparse3():
    cr = Criterion(3, "sparse three-vertex graph")
    g = graph("sparse3")
    cr.check(theorem_a_bound(g) == 162, "theorem_a_bound 162")
    dense = dense_graph(2, 3, support(g))
    cr.check(generic_newton_polytope(g, 0).same_as(generic_newton_polytope(dense, 0)),
             "sampled N(G) equals the dense graph's polytope")
    _, _, rep = run("sparse3", 1)
    secs = RUN_SECONDS[("sparse3", 1, 0, False)]
    cr.check(rep.regular == 162, f"{rep.regular} regular")
    cr.check(secs < 300, f"{secs:.1f} s")
    cr.finish()


def test_criterion_4_sparse3_cut():
    cr = Criterion(4, "pruned three-vertex graph")
    g = graph("sparse3_cut")
    P = generic_newton_polytope(g, 0)
    cr.check(P.volume == Fraction(70, 3), f"volume {P.volume}")
    cr.check(P.normalized_volume == 140, f"normalized volume {P.normalized_volume}")
    missing = set(predicted_polytope(g).vertices) - set(P.vertices)
    cr.check(missing == {(3, 3, 0), (-3, -3, 0)}, f"missing vertices {sorted(missing)}")
    _, _, rep = run("sparse3_cut", 1)
    cr.check(rep.regular == 140, f"{rep.regular} regular")
    cr.finish()


def test_criterion_5_k4():
    cr = Criterion(5, "K4 cover")
    g, c, rep = run("k4", 1, faces=True)
    D = dispersion(g, c)
    P = newton_polytope(D)
    cr.check(P.volume == Fraction(20, 3), f"volume {P.volume}")
    cr.check(kushnirenko_bound(D) == 40, f"kushnirenko bound {kushnirenko_bound(D)}")
    vertical = [f for f in rep.faces if f.face.is_vertical and not f.face.is_base and f.face.dim == 2]
    cr.check(len(vertical) == 4, f"{len(vertical)} vertical facets")
    for f in vertical:
        cr.check(f.verdict == SOLUTIONS_FOUND and len(f.witnesses) == 2,
                 f"facet {f.face.normal}: {f.verdict} with {len(f.witnesses)} witnesses")
    cr.check(rep.total <= 32, f"{rep.total} torus critical points")
    cr.finish()


def test_criterion_6_hexagonal():
    cr = Criterion(6, "hexagonal lattice")
    g = graph("hexagonal")
    c = params_file(g, "hexagonal_params")
    D = dispersion(g, c)
    P = newton_polytope(D)
    cr.check(P.volume == 2 and P.normalized_volume == 12, f"N(D) volume {P.volume}, normalized {P.normalized_volume}")
    grid = band_functions(g, c)
    cr.check(grid.m == 2, f"{grid.m} bands")
    pts = real_extrema(g, c, grid, D)
    for j in range(grid.m):
        ext = [p for p in pts if p.band == j and p.kind in ("min", "max")]
        cr.check(len(ext) == 2, f"band {j + 1}: {len(ext)} nondegenerate extrema")
    rep = solve_cpe(g, c, CriticalOptions(skip_faces=True), D=D)
    match_to_solutions(pts, rep.solutions, tol=1e-6)
    ext = [p for p in pts if p.kind in ("min", "max")]
    cr.check(all(p.matched for p in ext), f"{sum(bool(p.matched) for p in ext)}/{len(ext)} extrema matched within 1e-6")
    cr.finish()


def _closed_form_points(D, d):
    from itertools import product
    for signs in product((1, -1), repeat=d):
        z = np.array(signs, dtype=complex)
        yield z, complex(D.evaluate(z, 0.0))


@pytest.mark.parametrize("name", ["chain", "square"])
def test_criterion_7_oracles(name):
    cr = Criterion(7, "closed-form oracles", name)
    g = graph(name)
    e, V = Fraction(5, 4), Fraction(-2, 3)
    c = Parameters((e,) * len(g.edges), (V,))
    D = dispersion(g, c)
    res = solve(cpe_system(D))
    sols = res.torus_solutions()
    expected = list(_closed_form_points(D, g.dimension))
    cr.check(len(sols) == len(expected), f"{len(sols)} solutions for {len(expected)} closed-form points")
    for z, lam in expected:
        x = np.append(z, lam)
        err = min(np.max(np.abs(s.point - x)) for s in sols)
        cr.check(err < 1e-9, f"closed form matched to {err:.1e}")
        hc = hessian_check(D, x)
        H = finite_difference_hessian(D, z, lam, angles=True)
        fd = complex(np.linalg.det(H))
        rel = abs(fd - hc.hessian_theta_det) / abs(hc.hessian_theta_det)
        cr.check(rel < 1e-5, f"Hessian det vs finite differences {rel:.1e}")
    cr.finish()


INSTANCES = [("dimer", 1, False), ("dense_wide", 1, False), ("sparse3", 1, False), ("sparse3_cut", 1, False), ("k4", 1, True)]


@pytest.mark.parametrize("name,seed,with_faces", INSTANCES)
def test_criterion_8_properties(name, seed, with_faces):
    cr = Criterion(8, "property suite", name)
    g, c, rep = run(name, seed, faces=with_faces)
    D = dispersion(g, c)
    P = newton_polytope(D)
    all_faces = faces(P)
    euler = True
    for F in P.facets():
        # a facial form is quasi-homogeneous for the facet normal, with value the facet height
        f = D.facial_form(F.points)
        w = F.normal
        rhs = sum((w[i] * f.toric_derivative(i) for i in range(D.dim)), f.lambda_toric_derivative() * w[-1])
        euler &= rhs == F.height * f
    cr.check(euler, "Euler identity exact on every facet")
    comm = all(D.toric_derivative(i).facial_form(F.points) == D.facial_form(F.points).toric_derivative(i)
               for F in all_faces for i in range(D.dim))
    cr.check(comm, "facial-derivative commutation exact")
    cr.check(predicted_polytope(g).contains(P), "N(D) inside mQ")
    paths = rep.path_summary
    cr.check(sum(paths["endpoints"].values()) == paths["paths"], "path accounting exact")
    worst = max((s["hessian"]["identity_error"] for _, _, s in _points(rep)
                 if s["hessian"]["identity_error"] is not None), default=0.0)
    cr.check(worst < 1e-7, f"Jacobian-Hessian identity to {worst:.1e}")
    consistent = all(s["regular"] == s["hessian"]["nondegenerate"] for _, _, s in _points(rep)
                     if not s["hessian"]["singular_bloch_point"])
    cr.check(consistent and rep.hessian_consistent, "regular iff nondegenerate")
    _, _, other = run(name, seed, gamma_seed=1, faces=False)
    cr.check(other.regular == rep.regular and other.total == rep.total,
             f"gamma seeds 0/1: {rep.regular}/{other.regular} regular")
    pa = np.array([[*z, lam] for z, lam, _ in _points(rep)])
    pb = np.array([[*z, lam] for z, lam, _ in _points(other)])
    if len(pa) and len(pa) == len(pb):
        gap = max(np.min(np.max(np.abs(pb - x), axis=1) / max(1.0, np.max(np.abs(x)))) for x in pa)
        cr.check(gap < 1e-8, f"solution sets agree to {gap:.1e}")
    cr.finish()

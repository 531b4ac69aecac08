from fractions import Fraction

import numpy as np
import pytest

from cpodpo.critical import (ATTAINED, INCONCLUSIVE, NO_SOLUTIONS, NOT_ATTAINED, SOLUTIONS_FOUND, CriticalOptions,
                             certify_cpp, check_face_smooth, cpe_equations, cpe_system, face_audit, facial_system,
                             finite_difference_hessian, hessian_check, implicit_hessian, gradient_jacobian,
                             laurent_residual, solve_cpe, substitute_signs)
from cpodpo.floquet import dispersion
from cpodpo.graph import Parameters, random_parameters
from cpodpo.laurent import LaurentPoly
from cpodpo.polytope import Face, convex_hull, generic_newton_polytope, newton_polytope

from conftest import graph, run


def _points(rep):
    out = []
    for s in rep.solutions:
        pt = s["point"]
        z = np.array([complex(*pt[k]) for k in pt if k != "lam"])
        out.append((z, complex(*pt["lam"]), s))
    return out


def test_hexagonal_cpe(hexagonal):
    D = dispersion(hexagonal, random_parameters(hexagonal, 1))
    eqs = cpe_equations(D)
    assert len(eqs) == 3
    for q in eqs[1:]:
        assert not any(e[:2] == (0, 0) for e in q.support())
    assert cpe_system(D).square


def test_square_lattice_cpe():
    g = graph("square")
    e = Fraction(7, 3)
    D = dispersion(g, Parameters((e, e), (Fraction(1),)))
    z1, z2 = LaurentPoly.z(2, 0), LaurentPoly.z(2, 1)
    eqs = cpe_equations(D)
    assert eqs[1] == -e * z1 + e * LaurentPoly.monomial(2, [-1, 0])
    assert eqs[2] == -e * z2 + e * LaurentPoly.monomial(2, [0, -1])


def test_degenerate_and_zero():
    assert cpe_system(LaurentPoly.z(2, 0) + 1).degenerate
    with pytest.raises(ValueError):
        cpe_system(LaurentPoly.zero(2))


def test_square_lattice_hessian():
    g = graph("square")
    e, V = Fraction(3, 2), Fraction(0)
    D = dispersion(g, Parameters((e, e), (V,)))
    hc = hessian_check(D, np.array([1, 1, 0], dtype=complex))
    assert hc.nondegenerate and not hc.singular_point
    # lam(theta) = V + e (4 - 2 cos t1 - 2 cos t2): angle Hessian diag(2e, 2e) at the origin
    assert abs(hc.hessian_theta_det - (2 * float(e)) ** 2) < 1e-12
    H = finite_difference_hessian(D, np.array([1, 1], dtype=complex), 0, angles=True)
    assert np.allclose(H, np.diag([3.0, 3.0]), rtol=1e-6)


def test_flat_lattice_singular_hessian():
    # zero weights: D = V - lam does not depend on z, every point is degenerate
    g = graph("square")
    D = dispersion(g, Parameters((Fraction(0), Fraction(0)), (Fraction(2),)))
    hc = hessian_check(D, np.array([1, 1, 2], dtype=complex))
    assert hc.nondegenerate is False


def test_singular_bloch_point():
    # D = lam^2 has dD/dlam = 0 at lam = 0
    D = LaurentPoly.lam(1) ** 2
    hc = hessian_check(D, np.array([1, 0], dtype=complex))
    assert hc.singular_point and hc.hessian_det is None


def test_dimer_report_invariants():
    g, c, rep = run("dimer", 1)
    assert rep.total == rep.regular + rep.singular_clusters
    assert (rep.verdict == ATTAINED) == (rep.regular == rep.kushnirenko_bound and rep.singular_clusters == 0)
    assert rep.total <= rep.kushnirenko_bound <= rep.theorem_a_bound
    eqs = cpe_equations(dispersion(g, c))
    for z, lam, s in _points(rep):
        assert laurent_residual(eqs, z, lam) < 1e-9
        assert s["residual_laurent"] < 1e-9


def test_dimer_hessians():
    g, c, rep = run("dimer", 1)
    D = dispersion(g, c)
    for z, lam, s in _points(rep):
        hc = hessian_check(D, np.append(z, lam))
        assert hc.nondegenerate
        assert hc.identity_error < 1e-7


def test_identity_with_independent_hessian():
    g, c, rep = run("dimer", 1)
    Dc = dispersion(g, c).to_complex()
    for z, lam, _ in _points(rep):
        J = gradient_jacobian(Dc, z, lam)
        H = implicit_hessian(Dc, z, lam)
        lhs = np.linalg.det(J)
        rhs = (-1) ** 2 * J[0, 0] ** 3 * np.linalg.det(H)
        assert abs(lhs - rhs) <= 1e-7 * abs(lhs)


def test_vertex_face_no_solutions():
    g = graph("dimer")
    D = dispersion(g, random_parameters(g, 1))
    P = newton_polytope(D)
    v = next(f for f in P.faces() if f.dim == 0 and not f.is_base)
    fs = facial_system(D, v)
    assert fs.trivial
    assert check_face_smooth(D, v).verdict == NO_SOLUTIONS


def test_base_face_rejected():
    g = graph("dimer")
    D = dispersion(g, random_parameters(g, 1))
    base = next(f for f in newton_polytope(D).faces() if f.is_base)
    with pytest.raises(ValueError):
        facial_system(D, base)


def test_binomial_edge_with_monomial_partner():
    # on the edge {(0,0,1),(1,0,0)} of D = lam + z1 + z2 + 1 the z2-derivative's facial form is zero
    # and the z1-derivative's facial form is the monomial z1, which never vanishes on the torus
    D = LaurentPoly(2, {(0, 0, 1): 1, (1, 0, 0): 2, (0, 1, 0): 3, (0, 0, 0): 5})
    P = newton_polytope(D)
    F = next(f for f in P.faces() if set(f.points) == {(0, 0, 1), (1, 0, 0)})
    assert check_face_smooth(D, F).verdict == NO_SOLUTIONS


def test_k4_vertical_facets():
    g = graph("k4")
    D = dispersion(g, random_parameters(g, 1))
    P = newton_polytope(D)
    vertical = [f for f in P.facets() if f.is_vertical]
    assert len(vertical) == 4
    for F in vertical:
        v = check_face_smooth(D, F)
        assert v.verdict == SOLUTIONS_FOUND
        assert len(v.witnesses) == 2
        fs = facial_system(D, F)
        for w in v.witnesses:
            y = np.asarray(w)
            vals = [abs(q.evaluate(y, 0)) for q in fs.equations]
            assert max(vals) < 1e-8


def test_substitute_signs():
    g = graph("square")
    D = dispersion(g, Parameters((Fraction(1), Fraction(2)), (Fraction(0),)))
    E = substitute_signs(D, {0: -1})
    assert E.dim == 1
    for t in (1, -1, 2.5):
        assert abs(E.evaluate([t], 0.3) - D.evaluate([-1, t], 0.3)) < 1e-12


def test_certify_texts():
    g, c, rep = run("dimer", 1)
    text = certify_cpp(rep, generic_newton_polytope(g, 0), seed=0)
    assert text.startswith("CPP-certified (numerical): single calculation with 32 regular solutions")
    g, c, rep = run("k4", 1, faces=True)
    text = certify_cpp(rep, generic_newton_polytope(g, 0))
    assert "deficit" in text and "4 vertical facets" in text
    assert rep.verdict == NOT_ATTAINED


def test_inconclusive_on_failed_paths():
    g = graph("dimer")
    c = random_parameters(g, 1)
    from cpodpo.solver import SolverOptions
    # a step budget far too small for any path to finish
    rep = solve_cpe(g, c, CriticalOptions(solver=SolverOptions(max_steps=3, retrack=False), skip_faces=True,
                                          monodromy=False))
    assert rep.verdict == INCONCLUSIVE


def test_report_serializable():
    import json
    g, c, rep = run("dimer", 1)
    json.dumps(rep.to_dict())

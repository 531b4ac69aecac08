"""Command-line entry point: ``cpodpo <subcommand> --graph FILE [...]``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__

SCHEMA = "cpodpo/1"
EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2

PARAM_COMMANDS = {"dispersion", "critical-points", "faces", "bands", "certify"}


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpodpo", description=__doc__)
    p.add_argument("--version", action="version", version=f"cpodpo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "dispersion", "polytope", "bound", "critical-points", "faces", "bands", "certify"):
        s = sub.add_parser(name)
        s.add_argument("--graph", required=True, metavar="PATH")
        grp = s.add_mutually_exclusive_group()
        grp.add_argument("--params", metavar="PATH")
        grp.add_argument("--seed", type=int)
        s.add_argument("--param-mode", choices=("rational", "complex"), default="rational")
        s.add_argument("--out", metavar="PATH")
        s.add_argument("--format", choices=("json", "text", "csv"), default="json")
        if name in ("critical-points", "faces", "certify"):
            s.add_argument("--tol-residual", type=float, default=1e-9)
            s.add_argument("--tol-regular", type=float, default=1e-8)
            s.add_argument("--tol-dedup", type=float, default=1e-6)
            s.add_argument("--gamma-seed", type=int, default=0)
        if name in ("critical-points", "certify"):
            s.add_argument("--skip-faces", action="store_true")
        if name == "bands":
            s.add_argument("--grid", type=int)
            s.add_argument("--cross-check", action="store_true",
                           help="solve the critical point equations and match real extrema against them")
    return p


# inputs -----------------------------------------------------------------------

def _load_graph(path: str):
    from .graph import GraphError, parse_graph

    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read graph file: {exc}") from exc
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from exc


def _load_params(g, args):
    from .graph import ParameterError, parse_parameters, random_parameters

    try:
        if args.params:
            try:
                text = Path(args.params).read_text()
            except OSError as exc:
                raise InputError(f"cannot read parameter file: {exc}") from exc
            return parse_parameters(g, text)
        if args.seed is not None:
            return random_parameters(g, args.seed, args.param_mode)
    except ParameterError as exc:
        raise InputError(f"ParameterError: {exc}") from exc
    return None


def _options(args):
    from .critical import CriticalOptions
    from .solver import SolverOptions

    sopt = SolverOptions(gamma_seed=args.gamma_seed, tol_regular=args.tol_regular, tol_dedup=args.tol_dedup)
    return CriticalOptions(solver=sopt, tol_residual=args.tol_residual,
                           skip_faces=getattr(args, "skip_faces", False))


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    return cfg


# formatting --------------------------------------------------------------------

def _polytope_dict(P) -> dict:
    return {
        "vertices": [list(v) for v in sorted(P.vertices)],
        "dimension": P.dim,
        "volume": str(P.volume),
        "normalized_volume": P.normalized_volume,
        "face_counts": {str(k): v for k, v in sorted(P.face_counts().items())},
    }


def _text(result: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k, v in result.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}: {len(v)} entries")
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(x for x in lines if x)


def _summary_table(rep: dict) -> str:
    c = rep["counts"]
    b = rep["bounds"]
    rows = [
        ("support-volume bound", b["theorem_a_bound"]),
        ("Kushnirenko bound", b["kushnirenko_bound"]),
        ("torus solutions", c["total_torus"]),
        ("regular", c["regular"]),
        ("singular clusters", c["singular_clusters"]),
        ("real torus", c["real_torus"]),
        ("max residual", f"{rep['max_residual']:.2e}"),
        ("verdict", rep["verdict"]),
    ]
    if rep.get("faces") is not None:
        verdicts = {}
        for f in rep["faces"]:
            verdicts[f["verdict"]] = verdicts.get(f["verdict"], 0) + 1
        rows.append(("faces", ", ".join(f"{k} {v}" for k, v in sorted(verdicts.items()))))
    w = max(len(r[0]) for r in rows)
    return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


def _emit(args, command: str, result: dict, text: str | None = None, csv_text: str | None = None) -> None:
    report = {"schema": SCHEMA, "version": __version__, "command": command, "config": _config(args),
              "result": result}
    if args.format == "csv":
        if csv_text is None:
            raise InputError(f"--format csv is not available for {command}")
        body = csv_text
    elif args.format == "text":
        body = (text if text is not None else _text(result)) + "\n"
    else:
        body = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(body)
        if args.format == "csv":
            Path(args.out).with_suffix(".json").write_text(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(body)
    if args.format == "json" and text is not None and not args.out:
        sys.stderr.write(text + "\n")


# subcommands --------------------------------------------------------------------

def _cmd_validate(args, g, c) -> int:
    from .graph import support

    res = {"valid": True, "dimension": g.dimension, "vertices": list(g.vertices),
           "edge_orbits": len(g.edges), "support": sorted(list(a) for a in support(g))}
    if c is not None:
        res["parameters"] = c.to_json(g)
    _emit(args, "validate", res)
    return EXIT_OK


def _cmd_dispersion(args, g, c) -> int:
    from .floquet import dispersion
    from .laurent import render

    D = dispersion(g, c)
    res = {"lambda_degree": D.lambda_degree(), "support_size": len(D), "exact": D.is_exact,
           "polynomial": render(D)}
    _emit(args, "dispersion", res, text=render(D))
    return EXIT_OK


def _cmd_polytope(args, g, c) -> int:
    from .floquet import dispersion
    from .polytope import generic_newton_polytope, newton_polytope, predicted_polytope

    res = {"predicted": _polytope_dict(predicted_polytope(g))}
    seed = args.seed if args.seed is not None else 0
    res["generic_sampled"] = dict(_polytope_dict(generic_newton_polytope(g, seed)), sample_seed=seed)
    if c is not None:
        P = newton_polytope(dispersion(g, c))
        res["newton_polytope"] = _polytope_dict(P)
        res["vertical_faces"] = [{"normal": list(f.normal), "dim": f.dim}
                                 for f in sorted(P.faces(), key=lambda f: (f.dim, f.normal))
                                 if f.is_vertical and not f.is_base]
    _emit(args, "polytope", res)
    return EXIT_OK


def _cmd_bound(args, g, c) -> int:
    from .floquet import dispersion
    from .polytope import kushnirenko_bound, predicted_polytope, theorem_a_bound

    res = {"theorem_a_bound": theorem_a_bound(g), "predicted_polytope": _polytope_dict(predicted_polytope(g))}
    if c is not None:
        res["kushnirenko_bound"] = kushnirenko_bound(dispersion(g, c))
    text = f"theorem_a_bound {res['theorem_a_bound']}\npredicted polytope vertices {res['predicted_polytope']['vertices']}"
    if "kushnirenko_bound" in res:
        text += f"\nkushnirenko_bound {res['kushnirenko_bound']}"
    _emit(args, "bound", res, text=text)
    return EXIT_OK


def _cmd_critical(args, g, c) -> int:
    from .critical import INCONCLUSIVE, solve_cpe

    rep = solve_cpe(g, c, _options(args)).to_dict()
    inconclusive = rep["verdict"] == INCONCLUSIVE or any(
        f["verdict"] == INCONCLUSIVE for f in (rep["faces"] or []))
    _emit(args, "critical-points", rep, text=_summary_table(rep))
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def _cmd_faces(args, g, c) -> int:
    from .critical import INCONCLUSIVE, face_audit
    from .floquet import dispersion

    opts = _options(args)
    verdicts = [f.to_dict() for f in face_audit(dispersion(g, c), options=opts.solver, seed=opts.face_seed)]
    res = {"faces": verdicts, "vertical_faces": sum(f["vertical"] and not f["base"] for f in verdicts)}
    _emit(args, "faces", res)
    return EXIT_INCONCLUSIVE if any(f["verdict"] == INCONCLUSIVE for f in verdicts) else EXIT_OK


def _cmd_bands(args, g, c) -> int:
    from .critical import CriticalOptions, solve_cpe
    from .floquet import dispersion
    from .graph import ParameterError
    from .spectrum import SpectrumSummary, band_functions, dispersion_residual, edges_covered, match_to_solutions, real_extrema

    try:
        grid = band_functions(g, c, args.grid)
    except ParameterError as exc:
        raise InputError(f"ParameterError: {exc}") from exc
    D = dispersion(g, c)
    pts = real_extrema(g, c, grid, D)
    res = SpectrumSummary(grid, pts).to_dict()
    res["dispersion_residual"] = dispersion_residual(grid, D)
    res["edges_covered"] = edges_covered(pts, grid)
    if args.cross_check:
        rep = solve_cpe(g, c, replace(CriticalOptions(), skip_faces=True), D=D)
        res["matched"] = match_to_solutions(pts, rep.solutions)
        res["match_tolerance"] = 1e-6
        res["critical_points"] = [p.to_dict() for p in pts]
    _emit(args, "bands", res, csv_text=grid.to_csv())
    return EXIT_OK


def _cmd_certify(args, g, c) -> int:
    from .critical import INCONCLUSIVE, certify_cpp, solve_cpe
    from .polytope import generic_newton_polytope

    seed = args.seed if args.seed is not None else 0
    report = solve_cpe(g, c, _options(args))
    generic = generic_newton_polytope(g, seed)
    text = certify_cpp(report, generic=generic, seed=seed)
    res = {"certificate": text, "verdict": report.verdict, "regular": report.regular,
           "kushnirenko_bound": report.kushnirenko_bound, "generic_normalized_volume": generic.normalized_volume,
           "report": report.to_dict()}
    _emit(args, "certify", res, text=text)
    return EXIT_INCONCLUSIVE if report.verdict == INCONCLUSIVE else EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "dispersion": _cmd_dispersion,
    "polytope": _cmd_polytope,
    "bound": _cmd_bound,
    "critical-points": _cmd_critical,
    "faces": _cmd_faces,
    "bands": _cmd_bands,
    "certify": _cmd_certify,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    from .floquet import BudgetExceeded

    try:
        g = _load_graph(args.graph)
        c = _load_params(g, args)
        if c is None and args.command in PARAM_COMMANDS:
            raise InputError(f"{args.command} needs --params or --seed")
        return COMMANDS[args.command](args, g, c)
    except (InputError, BudgetExceeded) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end.

Every demonstration is a subcommand with a seed, machine-readable JSON
or CSV output, and optional rendered figures. Identical seeds and flags
produce byte-identical output; floats are serialized with 17 significant
digits.

Exit codes: 0 success, 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import make_rng
from .entangle import AntiUnitaryMap, me_state, perfect_correlation_residual
from .contextuality import (
    Coloring,
    build_triad_graph,
    ks_color,
    linearity_counterexamples,
    load_directions,
    mermin_check,
    mixed_state_functional,
    octant_coloring,
    octant_counterexample_triple,
    peres33_directions,
    pure_state_functional,
    verify_coloring,
    vn_reconstruct,
)
from .lhv import (
    bell_inequality,
    constant_strategy,
    coplanar_direction,
    coplanar_scan,
    lhv_correlation,
    maximize_violation,
    sign_strategy,
    singlet_correlation,
    uniform_sphere,
)
from .linalg import LinalgError, StateVector, hermitian_eig, max_abs
from .schrodinger_nl import (
    bellext_state,
    conditional_correlation,
    conditional_expectation,
    schrodinger_ks_demo,
    schrodinger_mermin_demo,
)
from .sterngerlach import (
    FieldConfig,
    equivariance_check,
    evolve_packet,
    initial_packet,
    integrate_trajectory,
)

SCHEMA = "nll-1"


# ---------------------------------------------------------------------------
# Deterministic serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(float(x), ".17g")


def dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        flat = all(isinstance(v, (int, float, bool, str)) or v is None for v in obj)
        if flat:
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def emit_json(payload: dict, command: str) -> None:
    out = {"schema": SCHEMA, "command": command}
    out.update(payload)
    sys.stdout.write(dumps(out) + "\n")


def complex_matrix_payload(m: np.ndarray) -> dict:
    return {
        "real": [[float(x) for x in row] for row in np.real(m)],
        "imag": [[float(x) for x in row] for row in np.imag(m)],
    }


def write_csv(path: str | None, header: list[str], rows) -> None:
    def render(fh):
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")

    if path is None:
        render(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            render(fh)


def _plot_path(args, name: str) -> str | None:
    if getattr(args, "plot_dir", None) is None:
        return None
    path = Path(args.plot_dir)
    path.mkdir(parents=True, exist_ok=True)
    return str(path / name)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("NLL_SEED", "0"))


# ---------------------------------------------------------------------------
# bell


def cmd_bell_check(args) -> int:
    a = coplanar_direction(args.a)
    b = coplanar_direction(args.b)
    c = coplanar_direction(args.c)
    res = bell_inequality(lambda x, y: singlet_correlation(x, y), a, b, c)
    emit_json(
        {
            "phi_a_deg": float(args.a),
            "phi_b_deg": float(args.b),
            "phi_c_deg": float(args.c),
            "lhs": res.lhs,
            "rhs": res.rhs,
            "margin": res.margin,
            "violated": res.violated,
        },
        "bell check",
    )
    return 0


def cmd_bell_scan(args) -> int:
    phis, rows = coplanar_scan(singlet_correlation, args.grid_deg)
    best = maximize_violation(singlet_correlation, args.grid_deg, args.refine_levels)
    header = ["phi_a", "phi_b", "phi_c", "lhs", "rhs", "margin"]
    table = [(r.phi_a, r.phi_b, r.phi_c, r.lhs, r.rhs, r.margin) for r in rows]
    summary = {
        "grid_deg": float(args.grid_deg),
        "refine_levels": int(args.refine_levels),
        "best": {
            "phi_a_deg": best.phi_a_deg,
            "phi_b_deg": best.phi_b_deg,
            "phi_c_deg": best.phi_c_deg,
            "lhs": best.lhs,
            "rhs": best.rhs,
            "margin": best.margin,
        },
    }
    if args.format == "json":
        emit_json({**summary, "header": header, "rows": [list(r) for r in table]}, "bell scan")
    elif args.out is not None:
        write_csv(args.out, header, table)
        emit_json({**summary, "csv": args.out}, "bell scan")
    else:
        write_csv(None, header, table)
    plot = _plot_path(args, "bell_scan.png")
    if plot is not None:
        from . import plots

        n = len(phis)
        margin = np.array([r.margin for r in rows]).reshape(n, n)
        plots.save_bell_scan(plot, phis, margin, summary["best"])
    return 0


def cmd_bell_lhv(args) -> int:
    seed = _resolve_seed(args)
    strategy = sign_strategy() if args.strategy == "sign" else constant_strategy()
    dist = uniform_sphere()
    dirs = {
        "a": coplanar_direction(args.a),
        "b": coplanar_direction(args.b),
        "c": coplanar_direction(args.c),
    }
    pairs = {}
    estimates = {}
    for stream, (k1, k2) in enumerate((("a", "b"), ("a", "c"), ("b", "c"))):
        est = lhv_correlation(
            strategy, dist, dirs[k1], dirs[k2], samples=args.samples, seed=seed, stream=stream
        )
        pairs[k1 + k2] = est
        estimates[k1 + k2] = {"estimate": est.estimate, "stderr": est.stderr}
    lhs = abs(pairs["ab"].estimate - pairs["ac"].estimate)
    rhs = 1.0 + pairs["bc"].estimate
    margin_stderr = math.sqrt(
        pairs["ab"].stderr ** 2 + pairs["ac"].stderr ** 2 + pairs["bc"].stderr ** 2
    )
    margin = lhs - rhs
    equal_setting = lhv_correlation(
        strategy, dist, dirs["a"], dirs["a"], samples=min(args.samples, 1000), seed=seed, stream=3
    )
    emit_json(
        {
            "strategy": strategy.name,
            "samples": int(args.samples),
            "seed": seed,
            "phi_deg": {"a": float(args.a), "b": float(args.b), "c": float(args.c)},
            "correlations": estimates,
            "lhs": lhs,
            "rhs": rhs,
            "margin": margin,
            "margin_stderr": margin_stderr,
            "violated": margin > 4.0 * margin_stderr,
            "equal_setting_correlation": equal_setting.estimate,
        },
        "bell lhv",
    )
    return 0


# ---------------------------------------------------------------------------
# ks


def _coloring_payload(graph, coloring: Coloring) -> dict:
    violations = verify_coloring(graph, coloring)
    return {
        "directions": [[float(c) for c in d] for d in graph.directions],
        "values": list(coloring.values),
        "violations": [list(t) for t in violations],
    }


def cmd_ks_color(args) -> int:
    dirs = load_directions(args.file)
    graph = build_triad_graph(dirs)
    result = ks_color(graph, parallel=args.parallel)
    if result.uncolorable:
        emit_json(
            {
                "file": args.file,
                "uncolorable": True,
                "nodes": result.nodes,
                "num_directions": len(graph.directions),
                "num_triads": len(graph.triads),
                "directions": [[float(c) for c in d] for d in graph.directions],
            },
            "ks color",
        )
        return 0
    payload = _coloring_payload(graph, result.coloring)
    emit_json(
        {
            "file": args.file,
            "uncolorable": False,
            "nodes": result.nodes,
            "num_triads": len(graph.triads),
            **payload,
        },
        "ks color",
    )
    return 1 if payload["violations"] else 0


def cmd_ks_paper_triple(args) -> int:
    graph = build_triad_graph(octant_counterexample_triple(), tol=1e-12)
    coloring = octant_coloring(graph)
    payload = _coloring_payload(graph, coloring)
    emit_json(
        {
            "coloring_rule": "octant scheme: closed first octant above the equator and its antipode get 0",
            **payload,
            "violated": bool(payload["violations"]),
        },
        "ks paper-triple",
    )
    return 0


# ---------------------------------------------------------------------------
# mermin


def cmd_mermin(args) -> int:
    report = mermin_check()
    rows = [
        {
            "s1x": r.s1x, "s1y": r.s1y, "s2x": r.s2x, "s2y": r.s2y,
            "A": r.a, "B": r.b, "X": r.x, "Y": r.y, "C": r.c, "Z": r.z, "CZ": r.cz,
        }
        for r in report.assignments
    ]
    ok = report.assignments_all_plus_one and report.operator_is_minus_identity
    emit_json(
        {
            "assignments": rows,
            "cz_values": list(report.cz_values),
            "assignments_all_plus_one": report.assignments_all_plus_one,
            "operator_product": complex_matrix_payload(report.operator_product),
            "operator_deviation_from_minus_identity": report.operator_deviation,
            "operator_is_minus_identity": report.operator_is_minus_identity,
        },
        "mermin",
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entangle


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2.0


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    _, v = hermitian_eig(_random_hermitian(rng, n))
    return v


def cmd_entangle_verify(args) -> int:
    seed = _resolve_seed(args)
    rng = make_rng(seed)
    n = args.dim
    u = AntiUnitaryMap(_random_unitary(rng, n))
    state = me_state(u)
    max_residual = 0.0
    for _ in range(args.trials):
        max_residual = max(
            max_residual, perfect_correlation_residual(state, _random_hermitian(rng, n))
        )
    basis_residual = 0.0
    for _ in range(50):
        alt = me_state(u, _random_unitary(rng, n))
        basis_residual = max(basis_residual, max_abs(alt.state.amps - state.state.amps))
    ok = max_residual <= args.tol and basis_residual <= args.tol
    emit_json(
        {
            "dim": n,
            "trials": int(args.trials),
            "seed": seed,
            "max_residual": max_residual,
            "basis_invariance_residual": basis_residual,
            "tolerance": float(args.tol),
            "ok": ok,
        },
        "entangle verify",
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# schrodinger


def cmd_schrodinger_ks_demo(args) -> int:
    dirs = peres33_directions() if args.dirs is None else load_directions(args.dirs)
    report = schrodinger_ks_demo(args.dim, dirs)
    if report.coloring.uncolorable:
        coloring_payload = "UNCOLORABLE"
    else:
        coloring_payload = {
            "values": list(report.coloring.coloring.values),
            "violations": [
                list(t) for t in verify_coloring(report.graph, report.coloring.coloring)
            ],
        }
    payload = {
        "dim": int(args.dim),
        "directions_file": args.dirs if args.dirs is not None else "builtin:peres33",
        "num_directions": len(report.directions),
        "num_triads": len(report.graph.triads),
        "residual_max": report.residual_max,
        "coloring": coloring_payload,
        "nodes": report.coloring.nodes,
        "contradiction": report.contradiction,
        "tolerance": float(args.tol),
        "summary": report.summary,
    }
    if report.projector_residual is not None:
        payload["projector_residual"] = report.projector_residual
    emit_json(payload, "schrodinger ks-demo")
    return 0 if report.residual_max <= args.tol else 1


def cmd_schrodinger_mermin_demo(args) -> int:
    seed = _resolve_seed(args)
    report = schrodinger_mermin_demo(trials=args.trials, rng=make_rng(seed))
    emit_json(
        {
            "dim": report.n,
            "trials": int(args.trials),
            "seed": seed,
            "equality_rate": report.equality_rate,
            "marginal_max_gap_sigmas": report.marginal_max_gap_sigmas,
            "contexts": [
                {
                    "observable": r.observable,
                    "context": list(r.context),
                    "equality_rate": r.equality_rate,
                    "partner_plus_fraction": r.partner_plus_fraction,
                }
                for r in report.runs
            ],
            "value_map": {
                "assignments_all_plus_one": report.value_map.assignments_all_plus_one,
                "operator_deviation_from_minus_identity": report.value_map.operator_deviation,
            },
            "summary": report.summary,
        },
        "schrodinger mermin-demo",
    )
    return 0 if report.perfect else 1


def cmd_schrodinger_conditional(args) -> int:
    seed = _resolve_seed(args)
    state = bellext_state(args.dim)
    a = coplanar_direction(args.a)
    b = coplanar_direction(args.b)
    est = conditional_correlation(
        state.state, a, b, samples=args.samples, rng=make_rng(seed)
    )
    analytic, keep_prob = conditional_expectation(state.state, a, b)
    target = -a.dot(b)
    sigma = est.stderr if est.stderr > 0 else 1e-12
    ok = abs(est.estimate - analytic) <= 3.0 * sigma and abs(est.estimate - target) <= 3.0 * sigma
    emit_json(
        {
            "dim": int(args.dim),
            "samples": int(args.samples),
            "seed": seed,
            "phi_a_deg": float(args.a),
            "phi_b_deg": float(args.b),
            "estimate": est.estimate,
            "stderr": est.stderr,
            "keep_fraction": est.keep_fraction,
            "kept": est.kept,
            "analytic": analytic,
            "keep_probability": keep_prob,
            "minus_a_dot_b": target,
            "within_3_sigma": ok,
        },
        "schrodinger conditional",
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# vn


def cmd_vn_reconstruct(args) -> int:
    seed = _resolve_seed(args)
    rng = make_rng(seed)
    n = args.dim
    if args.state == "random":
        psi = StateVector((n,), rng.standard_normal(n) + 1j * rng.standard_normal(n))
        functional = pure_state_functional(psi)
        expected = np.outer(psi.amps, np.conj(psi.amps))
    else:
        functional = mixed_state_functional(n)
        expected = np.eye(n, dtype=complex) / n
    report = vn_reconstruct(functional, n, rng=rng)
    rec_error = max_abs(report.u - expected)
    ok = (
        rec_error <= args.tol
        and report.roundtrip_error <= args.tol
        and report.trace_expected is True
        and report.min_quadratic_form >= -args.tol
    )
    emit_json(
        {
            "state": args.state,
            "dim": n,
            "seed": seed,
            "reconstruction_error": rec_error,
            "roundtrip_error": report.roundtrip_error,
            "trace": {"re": report.trace.real, "im": report.trace.imag},
            "trace_is_one": bool(report.trace_expected),
            "nonneg_on_projections": report.nonneg_on_projections,
            "min_quadratic_form": report.min_quadratic_form,
            "tolerance": float(args.tol),
            "ok": ok,
        },
        "vn reconstruct",
    )
    return 0 if ok else 1


def cmd_vn_linearity(args) -> int:
    report = linearity_counterexamples()
    emit_json(
        {
            "spin_cases": [
                {"v_x": c.v_x, "v_y": c.v_y, "needed": c.needed, "satisfiable": c.satisfiable}
                for c in report.spin_cases
            ],
            "spin_satisfying_assignments": report.spin_satisfying,
            "oscillator_samples": report.oscillator_samples,
            "oscillator_odd_integer_hits": report.oscillator_odd_hits,
            "spectrum_multipliers_of_a_hbar": list(report.spectrum_multipliers),
        },
        "vn linearity",
    )
    return 0 if report.spin_impossible else 1


# ---------------------------------------------------------------------------
# bohm


def cmd_bohm_run(args) -> int:
    f = FieldConfig(gradient=args.gradient)
    traj = integrate_trajectory(
        args.z0, f, dt=args.dt, t_final=args.t_final, width=args.width
    )
    header = ["t", "z", "v", "density"]
    rows = [
        (float(t), float(z), float(v), float(d))
        for t, z, v, d in zip(traj.times, traj.positions, traj.velocities, traj.densities)
    ]
    summary = {
        "z0": float(args.z0),
        "gradient": float(args.gradient),
        "final_branch": traj.final_branch,
        "outcome": traj.outcome,
        "crossed": traj.crossed,
        "steps": len(rows) - 1,
    }
    if args.format == "json":
        emit_json({**summary, "header": header, "rows": [list(r) for r in rows]}, "bohm run")
    elif args.out is not None:
        write_csv(args.out, header, rows)
        emit_json({**summary, "csv": args.out}, "bohm run")
    else:
        write_csv(None, header, rows)
    plot = _plot_path(args, "bohm_trajectory.png")
    if plot is not None:
        from . import plots

        packet0 = initial_packet(width=args.width, mass=f.mass, hbar=f.hbar)
        ups, dns = [], []
        for t in traj.times:
            p = evolve_packet(packet0, f, float(t))
            ups.append(p.centers[0])
            dns.append(p.centers[1])
        plots.save_trajectory(plot, traj.times, traj.positions, np.array(ups), np.array(dns))
    return 0


def cmd_bohm_ensemble(args) -> int:
    seed = _resolve_seed(args)
    f = FieldConfig(gradient=args.gradient)
    report = equivariance_check(
        f, n=args.n, rng=make_rng(seed), dt=args.dt, t_final=args.t_final, width=args.width
    )
    emit_json(
        {
            "n": report.n,
            "gradient": float(args.gradient),
            "seed": seed,
            "upper_fraction": report.upper_fraction,
            "tv_distance": report.tv_distance,
            "crossings": report.crossings,
            "degenerate_geometry": report.degenerate,
        },
        "bohm ensemble",
    )
    if _plot_path(args, "bohm_ensemble.png") is not None:
        from . import plots

        rng = make_rng(seed)
        z0 = args.width * rng.standard_normal(args.n)
        z0[z0 == 0.0] = args.width
        from .sterngerlach import integrate_endpoints

        endpoints, _ = integrate_endpoints(z0, f, dt=args.dt, t_final=args.t_final, width=args.width)
        packet = evolve_packet(initial_packet(width=args.width), f, args.t_final)
        lo = min(packet.centers) - 5 * packet.width
        hi = max(packet.centers) + 5 * packet.width
        zgrid = np.linspace(lo, hi, 600)
        plots.save_ensemble(
            _plot_path(args, "bohm_ensemble.png"), endpoints, zgrid,
            packet.density(zgrid), report.tv_distance,
        )
    return 1 if report.crossings > 0 else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nllab",
        description="Desk-scale checks of quantum no-go arguments.",
    )
    parser.add_argument("--version", action="version", version=f"nllab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: NLL_SEED env var, else 0)")
    common.add_argument("--plot-dir", default=None,
                        help="directory for rendered figures (optional)")

    bell = sub.add_parser("bell", help="singlet correlations and the inequality")
    bell_sub = bell.add_subparsers(dest="subcommand", required=True)

    p = bell_sub.add_parser("check", parents=[common], help="evaluate one direction triple")
    p.add_argument("--a", type=float, default=0.0, help="phi_a in degrees (x-y plane)")
    p.add_argument("--b", type=float, default=60.0)
    p.add_argument("--c", type=float, default=120.0)
    p.set_defaults(func=cmd_bell_check)

    p = bell_sub.add_parser("scan", parents=[common], help="grid scan of coplanar triples")
    p.add_argument("--grid-deg", type=float, default=5.0)
    p.add_argument("--refine-levels", type=int, default=3)
    p.add_argument("-o", "--out", default=None, help="CSV path (JSON summary then on stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bell_scan)

    p = bell_sub.add_parser("lhv", parents=[common], help="local-model Monte Carlo correlations")
    p.add_argument("--strategy", choices=("sign", "const"), default="sign")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=60.0)
    p.add_argument("--c", type=float, default=120.0)
    p.set_defaults(func=cmd_bell_lhv)

    ks = sub.add_parser("ks", help="triad-graph colorings")
    ks_sub = ks.add_subparsers(dest="subcommand", required=True)

    p = ks_sub.add_parser("color", parents=[common], help="color a direction-set file")
    p.add_argument("--file", required=True)
    p.add_argument("--parallel", type=int, default=None, help="worker count for the search")
    p.set_defaults(func=cmd_ks_color)

    p = ks_sub.add_parser("paper-triple", parents=[common],
                          help="octant-coloring violation on the classic triple")
    p.set_defaults(func=cmd_ks_paper_triple)

    p = sub.add_parser("mermin", parents=[common], help="16-assignment table vs operator product")
    p.set_defaults(func=cmd_mermin)

    ent = sub.add_parser("entangle", help="maximally entangled state checks")
    ent_sub = ent.add_subparsers(dest="subcommand", required=True)
    p = ent_sub.add_parser("verify", parents=[common], help="perfect-correlation residuals")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_entangle_verify)

    sch = sub.add_parser("schrodinger", help="composed nonlocality demonstrations")
    sch_sub = sch.add_subparsers(dest="subcommand", required=True)

    p = sch_sub.add_parser("ks-demo", parents=[common])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--dirs", default=None, help="direction-set file (default: built-in 33 rays)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_schrodinger_ks_demo)

    p = sch_sub.add_parser("mermin-demo", parents=[common])
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_schrodinger_mermin_demo)

    p = sch_sub.add_parser("conditional", parents=[common])
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=60.0)
    p.set_defaults(func=cmd_schrodinger_conditional)

    vn = sub.add_parser("vn", help="expectation-functional reconstruction")
    vn_sub = vn.add_subparsers(dest="subcommand", required=True)
    p = vn_sub.add_parser("reconstruct", parents=[common])
    p.add_argument("--state", choices=("random", "mixed"), default="random")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_vn_reconstruct)
    p = vn_sub.add_parser("linearity", parents=[common],
                          help="spin and oscillator counterexamples")
    p.set_defaults(func=cmd_vn_linearity)

    bohm = sub.add_parser("bohm", help="pilot-wave Stern-Gerlach trajectories")
    bohm_sub = bohm.add_subparsers(dest="subcommand", required=True)

    p = bohm_sub.add_parser("run", parents=[common], help="one trajectory as CSV")
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--gradient", type=float, default=-5.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=4.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("-o", "--out", default=None, help="CSV path (JSON summary then on stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bohm_run)

    p = bohm_sub.add_parser("ensemble", parents=[common], help="equivariance report as JSON")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--gradient", type=float, default=-5.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=4.0)
    p.add_argument("--width", type=float, default=1.0)
    p.set_defaults(func=cmd_bohm_ensemble)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, LinalgError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

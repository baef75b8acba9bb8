"""Stage orchestration: profile -> metric -> {conformal, embedding, flattener}.

Each enabled stage yields exactly one Report (sub-checks nested inside).
A stage that raises a domain or convergence error is recorded with status
"error"; stages depending on it are recorded as "skipped".
"""

from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
import time

import numpy as np

from . import io
from .conformal import inverse_ricci_transform, ricci_condition, ricci_transform
from .config import DEPENDS, STAGES
from .embedding import build_shape_operator, embedding_report
from .errors import BiconserveError, ConvergenceError, DomainError
from .flattener import flattener_report, solve_exponent
from .grid import as_values
from .metric import (brioschi_exact, brioschi_fd, build_metric, christoffels_closed_form,
                     christoffels_fd, frame_connection_check, gauss_curvature_exact,
                     gauss_curvature_fd, kappa_closed_form, level_curve_curvature,
                     metric_derivatives)
from .profile import integrate_profile, pde_residual
from .report import Report, coarse_tolerance, combine, refinement_tolerance, residual_report

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

PDE_TOL = 1e-7
ROUND_TRIP_TOL = 5e-3
CIRCLE_TOL = 1e-10
S_INDEPENDENCE_TOL = 1e-12
CROSS_PATH_TOL = 1e-6
MIN_COLLOCATION_NODES = 6


# -- stages ---------------------------------------------------------------

def profile_stage(cfg):
    profile = integrate_profile(cfg.c, cfg.k0, cfg.kprime0, cfg.u_span, tol=cfg.ode_tol, n=cfg.nu)
    res = pde_residual(profile)
    # K'' comes from a 7-point stencil, so coarse grids relax at sixth order
    rep = residual_report("profile", res, coarse_tolerance(PDE_TOL, profile.h, order=6), None,
                          (profile.u_grid,),
                          boundary_width=0, truncated=bool(profile.truncated),
                          u_end=float(profile.u_grid[-1]), substeps=profile.meta.get("substeps"))
    rep.grid = {"nu": len(profile), "hu": profile.h}
    return rep, profile


def make_s_grid(cfg):
    return np.linspace(-cfg.s_extent, cfg.s_extent, cfg.ns)


def metric_checks(profile, grid):
    coords = (grid.u_grid, grid.s_grid)
    k = as_values(profile.k_values, grid)
    checks = []
    k_fd = gauss_curvature_fd(grid).values
    checks.append(residual_report("round_trip", k_fd - k, refinement_tolerance(ROUND_TRIP_TOL, grid.h),
                                  grid, coords))
    kappa_fd = level_curve_curvature(grid, profile).values
    kappa = kappa_closed_form(grid, profile).values
    checks.append(residual_report("circle_condition", kappa_fd - kappa, CIRCLE_TOL, grid, coords,
                                  boundary_width=0))
    spread = kappa_fd.max(axis=1) - kappa_fd.min(axis=1)
    checks.append(residual_report("kappa_s_independence", spread, S_INDEPENDENCE_TOL, None,
                                  (grid.u_grid,), boundary_width=0))
    md = metric_derivatives(profile, grid.s_grid)
    k_gauss, k_brio = gauss_curvature_exact(md), brioschi_exact(md)
    scale = max(1.0, float(np.max(np.abs(k))))
    checks.append(residual_report("gauss_vs_brioschi", (k_gauss - k_brio) / scale, CROSS_PATH_TOL,
                                  grid, coords, boundary_width=0,
                                  fd_gap=float(np.max(np.abs(k_fd - brioschi_fd(grid).values)))))
    closed = christoffels_closed_form(grid, profile)
    fd = christoffels_fd(grid)
    gap = np.max(np.abs(closed.christoffels - fd.christoffels), axis=(0, 1, 2))
    gscale = max(1.0, float(np.max(np.abs(closed.christoffels))))
    checks.append(residual_report("christoffel_cross_path", gap / gscale,
                                  refinement_tolerance(1e-3, grid.h), grid, coords))
    checks.append(frame_connection_check(grid, profile, closed))
    return combine("metric", checks, grid)


def conformal_checks(profile, grid, variant):
    c = profile.c
    k = profile.k_values
    forms = ("i", "ii", "iii", "iv") if c == 0 else ("i", "ii", "iii")
    checks = []
    for form in forms:
        checks.append(ricci_condition(grid, k, c, variant, form).report)
    if c == 0:
        new_grid, rep = ricci_transform(grid, k)
        rep.report.name = "transform/minimal_ii"
        rep.report.checks.insert(0, rep.precondition.report)
        rep.report.passed = rep.passed
        if rep.report.status != "n/a":
            rep.report.status = "pass" if rep.passed else "fail"
        checks.append(rep.report)
        k_new = -np.sqrt(-as_values(k, grid)) / 3.0
        _, inv = inverse_ricci_transform(new_grid, k_new)
        inv.report.name = "inverse_transform/kr3"
        checks.append(inv.report)
    return combine("conformal", checks, grid, variant=variant)


def flattener_stage(cfg, profile, grid):
    solutions = {}
    checks = []
    for method in cfg.flatten_methods:
        if method == "collocation" and len(profile) < MIN_COLLOCATION_NODES:
            checks.append(Report(f"flattener/{method}", 0.0, 0.0, 0.0, True, status="n/a",
                                 details={"not_evaluated": f"needs >= {MIN_COLLOCATION_NODES} "
                                                           f"u samples, have {len(profile)}"}))
            continue
        tol = cfg.solver_tol if method == "shooting" else max(cfg.solver_tol, 1e-6)
        sol = solve_exponent(profile, *cfg.r_init, method=method, tol=tol)
        solutions[method] = sol
        rep = flattener_report(profile, sol, grid.s_grid, base_tol=cfg.flat_tol)
        rep.name = f"flattener/{method}"
        rep.details.update(r_min=float(sol.r.min()), r_max=float(sol.r.max()),
                           iterations=len(sol.trace), degenerate=len(sol.degenerate))
        checks.append(rep)
    if len(solutions) == 2:
        a, b = solutions["shooting"], solutions["collocation"]
        checks.append(residual_report("flattener/agreement", a.r - b.r, 1e-5, None,
                                      (profile.u_grid,), boundary_width=0))
    return combine("flattener", checks, grid, r_init=list(cfg.r_init)), solutions


# -- orchestration --------------------------------------------------------

@dataclass
class RunResult:
    exit_code: int
    reports: dict
    timings: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)


def _error_report(stage, exc):
    return Report(stage, float("inf"), float("inf"), 0.0, False, status="error",
                  details={"error": type(exc).__name__, "message": str(exc)})


def _skipped_report(stage, blocker):
    return Report(stage, 0.0, 0.0, 0.0, False, status="skipped", details={"blocked_by": blocker})


def run_pipeline(cfg):
    reports, timings, art = {}, {}, {}
    failed = set()
    numeric_failure = False

    def needed(stage):
        return any(cfg.enabled(s) and stage in _closure(s) for s in STAGES)

    for stage in STAGES:
        if not (cfg.enabled(stage) or needed(stage)):
            continue
        blockers = [d for d in DEPENDS[stage] if d in failed]
        if blockers:
            failed.add(stage)
            if cfg.enabled(stage):
                reports[stage] = _skipped_report(stage, blockers[0])
            continue
        t0 = time.perf_counter()
        try:
            rep = _run_stage(stage, cfg, art)
        except (DomainError, ConvergenceError) as exc:
            log.error("stage %s failed: %s", stage, exc)
            numeric_failure = True
            failed.add(stage)
            rep = _error_report(stage, exc)
        timings[stage] = time.perf_counter() - t0
        if cfg.enabled(stage):
            reports[stage] = rep
            if not rep.passed:
                failed.add(stage)
        if rep is not None:
            log.info("%s", rep.summary_line())
    if numeric_failure:
        code = EXIT_NUMERIC
    elif all(r.passed for r in reports.values()):
        code = EXIT_OK
    else:
        code = EXIT_CHECK
    return RunResult(code, reports, timings, art)


def _closure(stage):
    out = set(DEPENDS[stage])
    for d in DEPENDS[stage]:
        out |= _closure(d)
    return out


def _run_stage(stage, cfg, art):
    if stage == "profile":
        rep, art["profile"] = profile_stage(cfg)
        return rep
    profile = art["profile"]
    if stage == "metric":
        art["grid"] = build_metric(profile, make_s_grid(cfg))
        return metric_checks(profile, art["grid"]) if cfg.enabled("metric") else None
    grid = art["grid"]
    if stage == "conformal":
        return conformal_checks(profile, grid, cfg.variant)
    if stage == "embedding":
        art["shape"] = build_shape_operator(profile, grid)
        return embedding_report(profile, grid, art["shape"])
    if stage == "flattener":
        rep, art["exponents"] = flattener_stage(cfg, profile, grid)
        return rep
    raise ValueError(stage)


# -- output ---------------------------------------------------------------

def reports_json(result, cfg):
    """Deterministic report bundle (no timings, no output path)."""
    config = cfg.to_dict()
    config.pop("out")
    config.pop("plots")
    bundle = {
        "config": config,
        "exit_code": result.exit_code,
        "reports": {k: v.to_dict() for k, v in result.reports.items()},
    }
    return json.dumps(bundle, indent=2, sort_keys=True) + "\n"


def summary_table(result):
    lines = [f"{'stage':<40s} {'STATUS':<7s} max / tol"]
    for rep in result.reports.values():
        lines.append(rep.summary_line())
        for sub in rep.checks:
            lines.append("  " + sub.summary_line())
    lines.append(f"exit code {result.exit_code}")
    return "\n".join(lines) + "\n"


def write_outputs(result, cfg, out=None, timings=True):
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    art = result.artifacts
    if "profile" in art:
        io.write_profile_csv(art["profile"], out / "profile.csv")
    if "grid" in art:
        io.write_metric_csv(art["grid"], out / "metric.csv")
    if "shape" in art:
        io.write_shape_csv(art["shape"], art["grid"], out / "shape_operator.csv")
    for method, sol in art.get("exponents", {}).items():
        io.write_exponent_csv(sol, out / f"exponent_{method}.csv")
        io.write_trace_jsonl(sol.trace, out / f"solver_trace_{method}.jsonl")
    (out / "reports.json").write_text(reports_json(result, cfg))
    (out / "summary.txt").write_text(summary_table(result))
    if timings:
        meta = {"wall_time_s": {k: round(v, 6) for k, v in result.timings.items()},
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
        (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if cfg.plots:
        write_plots(result, out / "plots")
    return out


def write_plots(result, plot_dir):
    art = result.artifacts
    if "profile" in art:
        p = art["profile"]
        io.write_dat(plot_dir / "profile.dat", {"u": p.u_grid, "K": p.k_values, "Kprime": p.kprime_values},
                     comment=f"curvature profile, c = {p.c:g}")
        io.write_dat(plot_dir / "pde_residual.dat", {"u": p.u_grid, "residual": pde_residual(p)})
    if "grid" in art:
        g = art["grid"]
        io.write_grid_dat(plot_dir / "g12.dat", g, g.g12, "g12")
        io.write_grid_dat(plot_dir / "round_trip_error.dat", g,
                          gauss_curvature_fd(g).values - as_values(art["profile"].k_values, g),
                          "K_fd_minus_K")
    if "shape" in art:
        s = art["shape"]
        io.write_dat(plot_dir / "mean_curvature.dat",
                     {"u": art["grid"].u_grid, "f": s.f[:, 0], "lambda1": s.lambda1[:, 0],
                      "lambda2": s.lambda2[:, 0]})
    for method, sol in art.get("exponents", {}).items():
        io.write_dat(plot_dir / f"exponent_{method}.dat",
                     {"u": sol.u_grid, "r": sol.r, "rprime": sol.rprime, "rsecond": sol.rsecond,
                      "rthird": sol.rthird})


__all__ = ["run_pipeline", "write_outputs", "reports_json", "summary_table", "RunResult", "EXIT_OK", "EXIT_CHECK", "EXIT_CONFIG",
           "EXIT_NUMERIC", "BiconserveError"]

"""Residual summaries shared by every verification stage."""

from dataclasses import dataclass, field
import json

import numpy as np

BOUNDARY_WIDTH = 2


def interior(values, width=BOUNDARY_WIDTH):
    """Drop ``width`` samples from every edge of a 1-D or 2-D array."""
    values = np.asarray(values)
    if width == 0:
        return values
    idx = tuple(slice(width, n - width) if n > 2 * width else slice(n // 2, n // 2 + 1)
                for n in values.shape)
    return values[idx]


def _boundary_max(values, width):
    values = np.abs(np.asarray(values, dtype=float))
    mask = np.ones(values.shape, dtype=bool)
    mask[tuple(slice(width, n - width) if n > 2 * width else slice(n // 2, n // 2 + 1)
               for n in values.shape)] = False
    return float(values[mask].max()) if mask.any() else 0.0


def refinement_tolerance(base, h, h_ref=1e-2):
    """Tolerance ``base`` at spacing ``h_ref``, scaled as (h / h_ref)^2."""
    return base * (h / h_ref) ** 2


def coarse_tolerance(base, h, order=2, h_ref=1e-2):
    """``base`` on grids at least as fine as ``h_ref``; relaxed as (h / h_ref)^order above it.

    For checks whose desk tolerance is a fixed floor rather than an h^2 law;
    ``order`` is the accuracy order of the discretization being checked.
    """
    return base * max(1.0, (h / h_ref) ** order)


def band_covers(shape, width):
    """True when edge bands of ``width`` leave no interior sample on some axis."""
    return width > 0 and any(n <= 2 * width for n in shape)


@dataclass
class Report:
    """One verification result.

    ``max_residual`` / ``l2_residual`` are taken over the interior (edge
    bands of ``boundary_width`` excluded); the edge maximum is reported as
    ``boundary_max`` but does not affect ``passed``.
    """

    name: str
    max_residual: float
    l2_residual: float
    tolerance: float
    passed: bool
    location: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    boundary_max: float = 0.0
    boundary_width: int = BOUNDARY_WIDTH
    details: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    status: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def to_dict(self):
        out = {
            "name": self.name,
            "status": self.status,
            "passed": bool(self.passed),
            "max_residual": _num(self.max_residual),
            "l2_residual": _num(self.l2_residual),
            "tolerance": _num(self.tolerance),
            "location": [_num(x) for x in self.location],
            "boundary_max": _num(self.boundary_max),
            "boundary_width": self.boundary_width,
            "grid": {k: _num(v) for k, v in self.grid.items()},
        }
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        if self.checks:
            out["checks"] = [c.to_dict() for c in self.checks]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_line(self):
        return (f"{self.name:<40s} {self.status.upper():<7s} max={self.max_residual:.3e} "
                f"tol={self.tolerance:.3e}")


def _num(x):
    if isinstance(x, (np.floating, float)):
        # strict JSON has no inf/nan
        return float(x) if np.isfinite(x) else None
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    return x


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return _num(v)


def residual_report(name, residual, tolerance, grid=None, coords=None,
                    boundary_width=BOUNDARY_WIDTH, **details):
    """Summarize a residual array against ``tolerance``.

    ``coords`` is a tuple of coordinate arrays (one per axis) used to
    report where the interior maximum sits.
    """
    residual = np.asarray(residual, dtype=float)
    inner = np.abs(interior(residual, boundary_width))
    if inner.size == 0 or not np.all(np.isfinite(inner)):
        max_res = float("inf") if inner.size else 0.0
        l2 = max_res
        loc = []
    else:
        flat = int(np.argmax(inner))
        idx = np.unravel_index(flat, inner.shape)
        max_res = float(inner[idx])
        offset = [boundary_width if n > 2 * boundary_width else n // 2 for n in residual.shape]
        full_idx = [i + o for i, o in zip(idx, offset)]
        loc = ([float(coords[a][full_idx[a]]) for a in range(len(full_idx))]
               if coords is not None else [int(i) for i in full_idx])
        if grid is not None:
            weight = grid.hu * grid.hs if residual.ndim == 2 else grid.hu
        else:
            weight = 1.0 / inner.size
        l2 = float(np.sqrt(np.sum(inner**2) * weight))
    if band_covers(residual.shape, boundary_width):
        # every sample sits in the edge band, where one-sided stencils dominate
        details = {**details, "not_evaluated": f"grid {list(residual.shape)} too small for "
                                               f"boundary width {boundary_width}"}
    return Report(
        name=name,
        max_residual=max_res,
        l2_residual=l2,
        tolerance=float(tolerance),
        passed=bool(max_res < tolerance) or band_covers(residual.shape, boundary_width),
        status="n/a" if band_covers(residual.shape, boundary_width) else "",
        location=loc,
        grid=grid.describe() if grid is not None else {},
        boundary_max=_boundary_max(residual, boundary_width) if residual.size else 0.0,
        boundary_width=boundary_width,
        details=details,
    )


def combine(name, checks, grid=None, **details):
    """Roll several reports into one stage report (passes iff all pass).

    Checks with status "n/a" count as passing and are ignored when picking
    the worst check, unless nothing else was evaluated.
    """
    evaluated = [c for c in checks if c.status != "n/a"] or list(checks)
    worst = max(evaluated, key=lambda r: r.max_residual / r.tolerance if r.tolerance else np.inf)
    return Report(
        name=name,
        max_residual=worst.max_residual,
        l2_residual=worst.l2_residual,
        tolerance=worst.tolerance,
        passed=all(c.passed for c in checks),
        location=worst.location,
        grid=grid.describe() if grid is not None else worst.grid,
        details={"worst_check": worst.name, **details},
        checks=list(checks),
    )

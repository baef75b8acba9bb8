"""Grid-sampled data: metrics, scalar fields, connection data."""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooSmallError, MismatchError


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _spacing(x, name):
    if x.size < 2:
        return 0.0
    d = np.diff(x)
    if np.any(d <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    h = float(x[-1] - x[0]) / (x.size - 1)
    if not np.allclose(d, h, rtol=1e-8, atol=0.0):
        raise ValueError(f"{name} must be uniformly spaced")
    return h


@dataclass(frozen=True, eq=False)
class MetricGrid:
    """First fundamental form g11 du^2 + 2 g12 du ds + g22 ds^2 on a uniform grid.

    Arrays are indexed ``[i_u, i_s]``.  ``c`` is carried along for the
    checks that need the ambient curvature; ``meta`` holds provenance such
    as the chart name.
    """

    u_grid: np.ndarray
    s_grid: np.ndarray
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    c: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("u_grid", "s_grid", "g11", "g12", "g22"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        shape = (self.u_grid.size, self.s_grid.size)
        for name in ("g11", "g12", "g22"):
            if getattr(self, name).shape != shape:
                raise MismatchError(f"{name} has shape {getattr(self, name).shape}, grid is {shape}")
        object.__setattr__(self, "hu", _spacing(self.u_grid, "u_grid"))
        object.__setattr__(self, "hs", _spacing(self.s_grid, "s_grid"))
        if np.any(self.det <= 0):
            raise ValueError("metric is not positive definite everywhere")

    @property
    def shape(self):
        return self.g11.shape

    @property
    def det(self):
        return self.g11 * self.g22 - self.g12 * self.g12

    @property
    def h(self):
        """The coarser of the two spacings; refinement studies index on it."""
        return max(self.hu, self.hs)

    def mesh(self):
        return np.meshgrid(self.u_grid, self.s_grid, indexing="ij")

    def require(self, n):
        if min(self.shape) < n:
            raise GridTooSmallError(f"need >= {n} samples per axis, grid is {self.shape}")

    def scaled(self, factor, **meta):
        """The conformal metric factor * g on the same chart."""
        factor = np.broadcast_to(np.asarray(factor, dtype=float), self.shape)
        return MetricGrid(self.u_grid, self.s_grid, factor * self.g11, factor * self.g12,
                          factor * self.g22, c=self.c, meta={**self.meta, **meta})

    def describe(self):
        nu, ns = self.shape
        return {"nu": nu, "ns": ns, "hu": self.hu, "hs": self.hs}


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray
    grid: MetricGrid = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.grid is not None and self.values.shape != self.grid.shape:
            raise MismatchError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def shape(self):
        return self.values.shape


def as_values(field_or_array, grid=None):
    """Plain ndarray from a ScalarField, array or scalar, broadcast to ``grid``.

    One-dimensional input is read as a function of u alone.
    """
    vals = np.asarray(field_or_array, dtype=float)
    if grid is not None:
        if vals.ndim == 1 and vals.size == grid.shape[0]:
            vals = vals[:, None]
        try:
            vals = np.broadcast_to(vals, grid.shape)
        except ValueError:
            raise MismatchError(f"field of shape {vals.shape} does not fit grid {grid.shape}") from None
    return vals


@dataclass(frozen=True, eq=False)
class ConnectionData:
    """Christoffel symbols ``christoffels[k, i, j]`` and the orthonormal frame.

    ``x1``/``x2`` are the (d_u, d_s) components of X1, X2; ``dx1[m][k]`` is
    the partial derivative along coordinate m of the k-th component of X1
    (likewise ``dx2``).  ``source`` records "closed-form" or "fd".
    """

    christoffels: np.ndarray
    x1: tuple
    x2: tuple
    dx1: tuple
    dx2: tuple
    source: str = ""

    def symmetry_defect(self):
        gam = self.christoffels
        return float(np.max(np.abs(gam[:, 0, 1] - gam[:, 1, 0])))

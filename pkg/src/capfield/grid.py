"""Spatial discretization and Banach-lattice operations on nodal fields.

The state space is a weighted L^p space over a finite node set.  Quadrature
is fixed-weight nodal (midpoint cells), so the dual pairing and the norms are
exactly bilinear and order-preserving, which the lattice identities used by
the tests require.  The default exponent is p = 2, so the dual space shares
the same nodal representation; a general p is carried through norms and the
conjugate exponent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolationError, GridMismatchError

GEOMETRIES = ("circle", "interval", "abstract-finite")

# Strict-positivity threshold for inputs of negative powers; the profit
# gradient k^(-alpha) blows up at 0.
EPS_POS = 1e-12


@dataclass(frozen=True)
class SpatialGrid:
    """Finite measure space (nodes, quadrature weights) hosting the L^p pairing.

    Attributes
    ----------
    geometry : str
        One of ``circle`` (nodes on [0, 1) identified with the unit circle),
        ``interval`` (midpoint nodes on (0, 1)), or ``abstract-finite``.
    nodes : ndarray
        Node coordinates, strictly increasing for circle/interval.
    weights : ndarray
        Strictly positive quadrature masses; their sum is the total measure.
    p : float
        Integrability exponent, in (1, inf).
    """

    geometry: str
    nodes: np.ndarray
    weights: np.ndarray
    p: float

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if nodes.size < 2:
            raise ValueError("need at least 2 nodes")
        if not np.all(weights > 0.0):
            raise ValueError("all quadrature weights must be strictly positive")
        if self.geometry in ("circle", "interval") and not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not self.p > 1.0:
            raise ValueError("exponent p must be > 1")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def p_star(self) -> float:
        """Conjugate exponent p / (p - 1)."""
        return self.p / (self.p - 1.0)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def make_grid(geometry: str, n: int, total_mass: float, p: float) -> SpatialGrid:
    """Uniform grid with n nodes and equal quadrature masses total_mass / n.

    Circle nodes sit at i/n on [0, 1); interval nodes at cell midpoints
    (i + 1/2)/n; the abstract geometry just enumerates node indices.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not total_mass > 0.0:
        raise ValueError("total_mass must be > 0")
    if not p > 1.0:
        raise ValueError("p must be > 1")
    if geometry == "circle":
        nodes = np.arange(n) / n
    elif geometry == "interval":
        nodes = (np.arange(n) + 0.5) / n
    elif geometry == "abstract-finite":
        nodes = np.arange(n, dtype=float)
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    weights = np.full(n, total_mass / n)
    return SpatialGrid(geometry, nodes, weights, float(p))


@dataclass(frozen=True)
class Field:
    """Nodal values of an element of the state lattice (or its dual).

    Primal and dual elements share one nodal representation; an element
    belongs to the nonnegative cone when every nodal value is >= 0.
    Instances are immutable and safe to share across scenario workers.
    """

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {values.shape} does not match grid with {self.grid.n} nodes"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)


# The dual cone uses the same nodal representation (default p = 2 identifies
# the dual space with the primal one on a common grid).
DualField = Field


def _check_same_grid(a: Field, b: Field) -> None:
    ga, gb = a.grid, b.grid
    if ga is gb:
        return
    if (
        ga.geometry != gb.geometry
        or ga.p != gb.p
        or not np.array_equal(ga.nodes, gb.nodes)
        or not np.array_equal(ga.weights, gb.weights)
    ):
        raise GridMismatchError("fields live on different grids")


def unit_field(grid: SpatialGrid) -> Field:
    """The unitary vector: 1 at every node."""
    return Field(grid, np.ones(grid.n))


def zero_field(grid: SpatialGrid) -> Field:
    return Field(grid, np.zeros(grid.n))


def pairing(f: DualField, g: Field) -> float:
    """Dual pairing: the quadrature of the integral of f * g.

    Returns sum_i f_i g_i mu_i.  Raises GridMismatchError when the two
    fields are not discretized on the same grid.
    """
    _check_same_grid(f, g)
    return float(np.sum(f.values * g.values * f.grid.weights))


def maximum(a: Field, b: Field) -> Field:
    """Pointwise maximum (the lattice supremum)."""
    _check_same_grid(a, b)
    return Field(a.grid, np.maximum(a.values, b.values))


def minimum(a: Field, b: Field) -> Field:
    _check_same_grid(a, b)
    return Field(a.grid, np.minimum(a.values, b.values))


def power(a: Field, s: float) -> Field:
    """Pointwise power k -> k**s.

    Negative exponents require values strictly above EPS_POS; non-integer
    exponents require nonnegative values.
    """
    v = a.values
    if s < 0.0 and np.any(v <= EPS_POS):
        raise DomainViolationError(
            f"negative power {s} of a value <= {EPS_POS}"
        )
    if s >= 0.0 and s != int(s) and np.any(v < 0.0):
        raise DomainViolationError(f"fractional power {s} of a negative value")
    return Field(a.grid, v**s)


def norm_p(a: Field, exponent: float | None = None) -> float:
    """Weighted p-norm (sum |a_i|^p mu_i)^(1/p); defaults to the grid's p."""
    p = a.grid.p if exponent is None else float(exponent)
    return float(np.sum(np.abs(a.values) ** p * a.grid.weights) ** (1.0 / p))


def is_nonneg(a: Field, tol: float = 0.0) -> bool:
    """Membership test for the nonnegative cone (within -tol undershoot)."""
    return bool(np.all(a.values >= -tol))


def field_to_csv(f: Field) -> str:
    """CSV rows (node coordinate, weight, value), one per node."""
    lines = ["node,weight,value"]
    for x, w, v in zip(f.grid.nodes, f.grid.weights, f.values):
        lines.append(f"{x!r},{w!r},{v!r}")
    return "\n".join(lines) + "\n"


def field_to_json(f: Field) -> str:
    payload = {
        "geometry": f.grid.geometry,
        "nodes": f.grid.nodes.tolist(),
        "weights": f.grid.weights.tolist(),
        "values": f.values.tolist(),
    }
    return json.dumps(payload, sort_keys=True)


def field_from_json(text: str, p: float = 2.0) -> Field:
    payload = json.loads(text)
    grid = SpatialGrid(
        payload["geometry"],
        np.asarray(payload["nodes"], dtype=float),
        np.asarray(payload["weights"], dtype=float),
        p,
    )
    return Field(grid, np.asarray(payload["values"], dtype=float))

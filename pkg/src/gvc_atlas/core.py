"""ICIO data model, validation, technical coefficients and the Leontief inverse.

Storage conventions
-------------------
Every matrix is a dense C-ordered ``float64`` numpy array. Rows and columns of
``Z`` and rows of ``F`` follow the order of ``ICIOTable.nodes``; columns of
``F`` follow ``ICIOTable.countries``, which is the order in which countries
first appear in the node list. Memory use is ``O(M**2)`` for ``M`` nodes
(EORA26 is roughly 4940 nodes, i.e. about 200 MB per dense matrix).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConditioningError, NonViableError, StructuralError, UnknownCountryError

BALANCE_RTOL = 1e-6
RESIDUAL_TOL = 1e-8


class SectorGroup(str, enum.Enum):
    PRIMARY = "Primary"
    MANUFACTURING = "Manufacturing"
    BUSINESS_SERVICES = "BusinessServices"
    OTHER_SERVICES = "OtherServices"
    OTHER = "Other"


class Mode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class NodeIndex:
    """One country-sector pair."""

    country: str
    sector: str
    group: SectorGroup = SectorGroup.OTHER

    def __post_init__(self):
        object.__setattr__(self, "group", SectorGroup(self.group))

    @property
    def label(self) -> str:
        return f"{self.country}_{self.sector}"


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ICIOTable:
    """Inter-country input-output system for one year.

    ``Z`` is ``M x M`` intermediate flows, ``F`` is ``M x G`` final demand by
    destination country, ``va`` and ``x`` are length-``M`` value added and
    gross output. Arrays are copied and frozen on construction.
    """

    nodes: tuple[NodeIndex, ...]
    Z: np.ndarray
    F: np.ndarray
    va: np.ndarray
    x: np.ndarray
    year: int = 0
    countries: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        for name in ("Z", "F", "va", "x"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        object.__setattr__(self, "year", int(self.year))
        object.__setattr__(self, "countries", tuple(dict.fromkeys(n.country for n in nodes)))
        self._check_structure()

    def _check_structure(self):
        m, g = len(self.nodes), len(self.countries)
        pairs = [(n.country, n.sector) for n in self.nodes]
        if len(set(pairs)) != len(pairs):
            seen, dupes = set(), []
            for p in pairs:
                if p in seen:
                    dupes.append(p)
                seen.add(p)
            raise StructuralError(f"duplicate (country, sector) nodes: {dupes}")
        if self.Z.shape != (m, m):
            raise StructuralError(f"Z has shape {self.Z.shape}, expected ({m}, {m})")
        if self.F.shape != (m, g):
            raise StructuralError(f"F has shape {self.F.shape}, expected ({m}, {g})")
        for name in ("va", "x"):
            if getattr(self, name).shape != (m,):
                raise StructuralError(f"{name} has shape {getattr(self, name).shape}, expected ({m},)")
        for name in ("Z", "F", "va", "x"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise StructuralError(f"{name} contains non-finite values")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def country_mask(self, country: str) -> np.ndarray:
        if country not in self.countries:
            raise UnknownCountryError(f"unknown country {country!r}; table has {list(self.countries)}")
        return np.array([n.country == country for n in self.nodes], dtype=bool)

    def node_country_index(self) -> np.ndarray:
        """Position in ``countries`` of each node's country."""
        pos = {c: k for k, c in enumerate(self.countries)}
        return np.array([pos[n.country] for n in self.nodes], dtype=np.intp)

    def country_indicator(self) -> np.ndarray:
        """``M x G`` 0/1 matrix mapping nodes to their country."""
        ind = np.zeros((self.size, len(self.countries)))
        ind[np.arange(self.size), self.node_country_index()] = 1.0
        return ind

    def scaled(self, factor: float) -> "ICIOTable":
        return ICIOTable(self.nodes, self.Z * factor, self.F * factor, self.va * factor, self.x * factor, self.year)


@dataclass(frozen=True)
class Violation:
    kind: str  # row_balance | column_balance | negative_<field> on one node
    node: str
    magnitude: float
    detail: str = ""

    def __str__(self):
        text = f"{self.kind} at {self.node}: {self.magnitude:.6g}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass(frozen=True)
class ValidationReport:
    mode: Mode
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_table(table: ICIOTable, mode: Mode | str = Mode.LENIENT, rtol: float = BALANCE_RTOL) -> ValidationReport:
    """Check the balance and sign invariants of ``table``.

    Balance gaps are measured relative to ``x_i`` (absolute when ``x_i`` is
    zero). Strict mode rejects negative ``Z`` and ``F``; lenient mode accepts
    negative final demand (inventory changes) and only warns on negative
    ``Z``. Negative output or value added is a violation in both modes.
    Structural problems never reach this point: they raise at construction.
    """
    mode = Mode(mode)
    violations: list[Violation] = []
    warnings: list[Violation] = []
    labels = [n.label for n in table.nodes]
    x = table.x
    denom = np.where(x > 0, x, 1.0)

    row_gap = x - (table.Z.sum(axis=1) + table.F.sum(axis=1))
    col_gap = x - (table.Z.sum(axis=0) + table.va)
    for i in np.flatnonzero(np.abs(row_gap) / denom > rtol):
        violations.append(Violation("row_balance", labels[i], float(row_gap[i]), f"relative {abs(row_gap[i]) / denom[i]:.3g}"))
    for j in np.flatnonzero(np.abs(col_gap) / denom > rtol):
        violations.append(Violation("column_balance", labels[j], float(col_gap[j]), f"relative {abs(col_gap[j]) / denom[j]:.3g}"))

    for i in np.flatnonzero(x < 0):
        violations.append(Violation("negative_output", labels[i], float(x[i])))
    for j in np.flatnonzero(table.va < 0):
        violations.append(Violation("negative_va", labels[j], float(table.va[j])))

    z_neg = [Violation("negative_z", labels[i], float(table.Z[i, j]), f"column {labels[j]}") for i, j in np.argwhere(table.Z < 0)]
    if mode is Mode.STRICT:
        violations.extend(z_neg)
        violations.extend(
            Violation("negative_final", labels[i], float(table.F[i, r]), f"destination {table.countries[r]}")
            for i, r in np.argwhere(table.F < 0)
        )
    else:
        warnings.extend(z_neg)
    return ValidationReport(mode, tuple(violations), tuple(warnings))


@dataclass(frozen=True, eq=False)
class TechCoefficients:
    """``A[i, j] = Z[i, j] / x[j]`` and ``v[j] = va[j] / x[j]`` (0/0 taken as 0)."""

    A: np.ndarray
    v: np.ndarray
    nodes: tuple[NodeIndex, ...] = ()
    diagnostics: tuple[str, ...] = ()


def technical_coefficients(table: ICIOTable) -> TechCoefficients:
    x = table.x
    producing = x > 0
    safe_x = np.where(producing, x, 1.0)
    A = np.where(producing[None, :], table.Z / safe_x[None, :], 0.0)
    v = np.where(producing, table.va / safe_x, 0.0)
    diagnostics = tuple(f"zero output at {table.nodes[j].label}: column zeroed" for j in np.flatnonzero(~producing))
    return TechCoefficients(_readonly(A), _readonly(v), table.nodes, diagnostics)


@dataclass(frozen=True, eq=False)
class LeontiefInverse:
    B: np.ndarray
    residual_norm: float


def leontief_inverse(coeffs: TechCoefficients, tol: float = RESIDUAL_TOL) -> LeontiefInverse:
    """Solve ``(I - A) B = I`` by dense LU factorisation.

    Raises :class:`NonViableError` when some column of ``A`` sums to 1 or
    more, and :class:`ConditioningError` when the max-abs residual of the
    identity exceeds ``tol``.
    """
    A = coeffs.A
    m = A.shape[0]
    col_sums = A.sum(axis=0)
    bad = np.flatnonzero(col_sums >= 1.0)
    if bad.size:
        names = [coeffs.nodes[j].label if coeffs.nodes else str(j) for j in bad]
        raise NonViableError(f"column sums of A >= 1 at {names}; Leontief inverse not viable", names)
    eye = np.eye(m)
    L = eye - A
    B = np.linalg.solve(L, eye)
    residual = float(np.max(np.abs(L @ B - eye))) if m else 0.0
    if residual > tol:
        raise ConditioningError(f"Leontief residual {residual:.3g} exceeds {tol:g}", residual)
    B.setflags(write=False)
    return LeontiefInverse(B, residual)


def power_series(A: np.ndarray, order: int) -> np.ndarray:
    """Truncated series ``sum(A**k for k in 0..order)``."""
    m = A.shape[0]
    term = np.eye(m)
    total = np.eye(m)
    for _ in range(order):
        term = term @ A
        total += term
    return total


def build_table(
    nodes: Sequence[NodeIndex], A: np.ndarray, F: np.ndarray, year: int = 0
) -> ICIOTable:
    """Balanced table from coefficients and final demand: ``x = B f``, ``Z = A diag(x)``."""
    A = np.asarray(A, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    m = A.shape[0]
    x = np.linalg.solve(np.eye(m) - A, F.sum(axis=1))
    Z = A * x[None, :]
    va = (1.0 - A.sum(axis=0)) * x
    return ICIOTable(tuple(nodes), Z, F, va, x, year)

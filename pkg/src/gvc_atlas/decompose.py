"""Value-added decomposition of gross exports and GVC participation.

Everything here is read off one object: the value-added multiplier
``VB = diag(v) @ B``. Entry ``VB[i, j]`` is the value added created at node
``i`` per unit of final output of node ``j``; because ``v @ B == 1`` each
column of ``VB`` splits one unit of output into its value-added origins.
Applying it to country ``s``'s export vector ``e_s`` splits ``s``'s gross
exports by origin:

* DVA  -- value added from ``s`` itself,
* FVA  -- value added from other countries (backward participation),
* DVX  -- ``s``'s value added inside other countries' exports (forward).

Participation shares use the sink-based index (FVA/E and DVX/E). The
``gvc_share`` is their sum and is not a border-crossing count.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import ICIOTable, SectorGroup, leontief_inverse, technical_coefficients
from .errors import DivergenceError, UnknownCountryError

GVC_SHARE_DEFINITION = (
    "gvc_share = (FVA + DVX) / gross_exports using the sink-based value-added "
    "multiplier diag(v) B; not a border-crossing count"
)
NO_EXPORTS = "no exports"


class Attribution(str, enum.Enum):
    EXPORT_PRODUCT = "export-product"
    VA_ORIGIN = "va-origin"


@dataclass(frozen=True, eq=False)
class ExportVector:
    country: str
    e: np.ndarray
    total: float


@dataclass(frozen=True)
class ExportDecomposition:
    country: str
    dva: float
    fva: float
    dvx: float
    gross_exports: float
    backward_share: float
    forward_share: float
    gvc_share: float
    flags: tuple[str, ...] = ()

    @property
    def identity_residual(self) -> float:
        """Relative gap in ``dva + fva = gross_exports``."""
        gap = abs(self.dva + self.fva - self.gross_exports)
        return gap / self.gross_exports if self.gross_exports > 0 else gap

    def as_dict(self) -> dict:
        return {
            "country": self.country,
            "dva": self.dva,
            "fva": self.fva,
            "dvx": self.dvx,
            "gross_exports": self.gross_exports,
            "backward_share": self.backward_share,
            "forward_share": self.forward_share,
            "gvc_share": self.gvc_share,
            "flags": list(self.flags),
        }


@dataclass(frozen=True, eq=False)
class VAOriginMatrix:
    """``vax[t, s]``: value added from country ``t`` in country ``s``'s gross exports."""

    countries: tuple[str, ...]
    vax: np.ndarray

    def __getitem__(self, key: tuple[str, str]) -> float:
        t, s = key
        return float(self.vax[self.countries.index(t), self.countries.index(s)])


def export_matrix(table: ICIOTable) -> np.ndarray:
    """``M x G`` matrix whose column ``s`` is country ``s``'s export vector.

    Node ``i`` of country ``s`` exports its intermediate sales to nodes of
    other countries plus its final sales to other destinations.
    """
    home = table.node_country_index()
    g = len(table.countries)
    ind = table.country_indicator()
    # intermediate sales of node i to each destination country
    z_by_dest = table.Z @ ind
    sales = z_by_dest + table.F
    own = sales[np.arange(table.size), home]
    cross = sales.sum(axis=1) - own
    E = np.zeros((table.size, g))
    E[np.arange(table.size), home] = cross
    return E


def gross_exports(table: ICIOTable, country: str) -> ExportVector:
    mask = table.country_mask(country)
    e = np.where(mask, export_matrix(table)[:, table.countries.index(country)], 0.0)
    e.setflags(write=False)
    return ExportVector(country, e, float(e.sum()))


@dataclass(frozen=True, eq=False)
class GVCAccounts:
    """All value-added accounts of one table, computed once.

    ``vbe[i, s]`` is the value added originating at node ``i`` embodied in
    country ``s``'s gross exports; ``vax`` aggregates its rows by country.
    """

    table: ICIOTable
    vb: np.ndarray
    exports: np.ndarray
    vbe: np.ndarray
    vax: np.ndarray
    residual_norm: float

    @property
    def countries(self) -> tuple[str, ...]:
        return self.table.countries

    def index(self, country: str) -> int:
        try:
            return self.table.countries.index(country)
        except ValueError:
            raise UnknownCountryError(f"unknown country {country!r}; table has {list(self.table.countries)}") from None

    def gross_exports(self, country: str) -> float:
        return float(self.exports[:, self.index(country)].sum())

    def decomposition(self, country: str) -> ExportDecomposition:
        s = self.index(country)
        E = float(self.exports[:, s].sum())
        dva = float(self.vax[s, s])
        fva = float(self.vax[:, s].sum() - self.vax[s, s])
        dvx = float(self.vax[s, :].sum() - self.vax[s, s])
        if E > 0:
            backward, forward = fva / E, dvx / E
            flags: tuple[str, ...] = ()
        else:
            backward = forward = 0.0
            flags = (NO_EXPORTS,)
        return ExportDecomposition(country, dva, fva, dvx, E, backward, forward, backward + forward, flags)

    def _country_block(self, country: str):
        s = self.index(country)
        mask = self.table.node_country_index() == s
        return s, mask

    def dva_by_group(self, country: str, attribution: Attribution | str = Attribution.EXPORT_PRODUCT) -> dict:
        try:
            attribution = Attribution(attribution)
        except ValueError:
            raise ValueError(f"unknown attribution mode {attribution!r}; expected one of {[a.value for a in Attribution]}") from None
        s, mask = self._country_block(country)
        e = self.exports[:, s]
        if attribution is Attribution.EXPORT_PRODUCT:
            # value added from s's own nodes, attributed to the exporting node j
            per_node = self.vb[mask, :].sum(axis=0) * e
        else:
            per_node = np.where(mask, self.vbe[:, s], 0.0)
        groups = [n.group for n in self.table.nodes]
        amounts: dict[SectorGroup, float] = {}
        for j in np.flatnonzero(mask):
            amounts[groups[j]] = amounts.get(groups[j], 0.0) + float(per_node[j])
        total = sum(amounts.values())
        return {g: GroupShare(a, a / total if total > 0 else 0.0) for g, a in amounts.items()}

    def backward_manufacturing_share(self, country: str) -> float:
        s, mask = self._country_block(country)
        e = self.exports[:, s]
        E = e.sum()
        if E <= 0:
            return 0.0
        manuf = mask & np.array([n.group is SectorGroup.MANUFACTURING for n in self.table.nodes])
        foreign_content = self.vb[~mask, :].sum(axis=0)
        return float((foreign_content * e)[manuf].sum() / E)


@dataclass(frozen=True)
class GroupShare:
    amount: float
    share: float


def accounts(table: ICIOTable) -> GVCAccounts:
    coeffs = technical_coefficients(table)
    leo = leontief_inverse(coeffs)
    vb = coeffs.v[:, None] * leo.B
    E = export_matrix(table)
    vbe = vb @ E
    vax = table.country_indicator().T @ vbe
    for arr in (vb, E, vbe, vax):
        arr.setflags(write=False)
    return GVCAccounts(table, vb, E, vbe, vax, leo.residual_norm)


def va_origin_matrix(table: ICIOTable) -> VAOriginMatrix:
    return VAOriginMatrix(table.countries, accounts(table).vax)


def decompose_exports(table: ICIOTable, country: str) -> ExportDecomposition:
    return accounts(table).decomposition(country)


def decompose_all(table: ICIOTable) -> dict[str, ExportDecomposition]:
    acc = accounts(table)
    return {c: acc.decomposition(c) for c in table.countries}


def dva_by_group(table: ICIOTable, country: str, attribution: Attribution | str = Attribution.EXPORT_PRODUCT) -> dict:
    """DVA split by sector group: ``{group: GroupShare(amount, share)}``.

    ``export-product`` files value added under the group of the exporting
    node; ``va-origin`` under the group of the node where it was created.
    """
    return accounts(table).dva_by_group(country, attribution)


def backward_manufacturing_share(table: ICIOTable, country: str) -> float:
    """Foreign value added in manufacturing exports over total exports."""
    return accounts(table).backward_manufacturing_share(country)


@dataclass(frozen=True)
class ParticipationPoint:
    country: str
    year: int
    backward_share: float | None
    forward_share: float | None
    gvc_share: float | None
    gross_exports: float | None

    @property
    def missing(self) -> bool:
        return self.gross_exports is None


def participation_series(tables: Iterable[ICIOTable]) -> list[ParticipationPoint]:
    """Participation shares keyed by (country, year), sorted by country then year.

    Countries absent from a year's table get an explicit all-``None`` point.
    """
    by_year: dict[int, Mapping[str, ExportDecomposition]] = {}
    universe: dict[str, None] = {}
    for t in tables:
        by_year[t.year] = decompose_all(t)
        universe.update(dict.fromkeys(t.countries))
    out = []
    for c in sorted(universe):
        for y in sorted(by_year):
            d = by_year[y].get(c)
            if d is None:
                out.append(ParticipationPoint(c, y, None, None, None, None))
            else:
                out.append(ParticipationPoint(c, y, d.backward_share, d.forward_share, d.gvc_share, d.gross_exports))
    return out


@dataclass(frozen=True, eq=False)
class OracleTrace:
    """Power-series approximation of the value-added accounts.

    ``tail_bound[s]`` bounds the truncation error of column ``s`` of ``vax``.
    ``vb`` is the truncated ``diag(v) sum(A**k)``.
    """

    countries: tuple[str, ...]
    vax: np.ndarray
    tail_bound: np.ndarray
    rho: float
    order: int
    vb: np.ndarray
    exports: np.ndarray


def oracle_va_trace(table: ICIOTable, K: int = 200) -> OracleTrace:
    """Recompute ``vax`` with ``B`` replaced by ``sum(A**k for k <= K)``.

    Deliberately shares no code with :func:`accounts`: coefficients, exports
    and aggregation are all rebuilt with plain loops over nodes.
    """
    m = table.size
    x = table.x
    A = np.zeros((m, m))
    v = np.zeros(m)
    for j in range(m):
        if x[j] > 0:
            A[:, j] = table.Z[:, j] / x[j]
            v[j] = table.va[j] / x[j]
    rho = float(A.sum(axis=0).max()) if m else 0.0
    if rho >= 1.0:
        raise DivergenceError(f"max column sum of A is {rho:.6g} >= 1; power series diverges")

    countries = table.countries
    g = len(countries)
    home = [countries.index(n.country) for n in table.nodes]
    exports = np.zeros((m, g))
    for i in range(m):
        total = 0.0
        for j in range(m):
            if home[j] != home[i]:
                total += table.Z[i, j]
        for r in range(g):
            if r != home[i]:
                total += table.F[i, r]
        exports[i, home[i]] = total

    series = np.eye(m)
    term = np.eye(m)
    for _ in range(K):
        term = term @ A
        series = series + term
    vb = v[:, None] * series
    contrib = vb @ exports
    vax = np.zeros((g, g))
    for i in range(m):
        vax[home[i], :] += contrib[i, :]
    E = exports.sum(axis=0)
    v_inf = float(np.abs(v).max()) if m else 0.0
    tail = v_inf * rho ** (K + 1) / (1.0 - rho) * E
    return OracleTrace(countries, vax, tail, rho, K, vb, exports)

"""On-disk dataset format and the seeded synthetic-economy generator.

Layout of a dataset directory::

    manifest.txt            format_version=1
    nodes.csv               node_id,country,sector,group
    indicators.csv          country,year,ip_receipts_pct_gdp,rd_pct_gdp,population
    year=YYYY/z.csv         row_node,col_node,value     (sparse, absent = 0)
    year=YYYY/final.csv     row_node,dest_country,value (sparse, absent = 0)
    year=YYYY/va.csv        node,value
    year=YYYY/output.csv    node,value                  (optional)

Files are UTF-8 with LF line endings. Numbers use a decimal point, no
thousands separators, and are written with 17 significant digits so that
binary64 values survive a round trip exactly. Empty cells in
``indicators.csv`` mean "missing".
"""

from __future__ import annotations

import re
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ICIOTable, Mode, NodeIndex, SectorGroup, ValidationReport, build_table, validate_table
from .errors import DatasetExistsError, SchemaError, StructuralError, TableValidationError, UnknownNodeError

FORMAT_VERSION = 1
CODE_RE = re.compile(r"^[A-Z0-9_]+$")
NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
YEAR_DIR_RE = re.compile(r"^year=(\d{4})$")

HEADERS = {
    "nodes.csv": ("node_id", "country", "sector", "group"),
    "z.csv": ("row_node", "col_node", "value"),
    "final.csv": ("row_node", "dest_country", "value"),
    "va.csv": ("node", "value"),
    "output.csv": ("node", "value"),
    "indicators.csv": ("country", "year", "ip_receipts_pct_gdp", "rd_pct_gdp", "population"),
}


@dataclass(frozen=True)
class IndicatorRow:
    country: str
    year: int
    ip_receipts_pct_gdp: float | None
    rd_pct_gdp: float | None
    population: float | None


@dataclass(eq=False)
class Dataset:
    root: Path
    nodes: tuple[NodeIndex, ...]
    tables: dict[int, ICIOTable]
    indicators: list[IndicatorRow]
    reports: dict[int, ValidationReport] = field(default_factory=dict)

    @property
    def years(self) -> list[int]:
        return sorted(self.tables)

    def external_for(self, year: int) -> dict:
        from .taxonomy import ExternalIndicators

        return {
            r.country: ExternalIndicators(r.ip_receipts_pct_gdp, r.rd_pct_gdp, r.population)
            for r in self.indicators
            if r.year == year
        }


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _read_rows(path: Path) -> list[tuple[int, list[str]]]:
    """Data rows of a header-checked CSV, as ``(line_number, cells)``."""
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise SchemaError("file not found", path) from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise SchemaError("file is not valid UTF-8", path, line) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    expected = HEADERS[path.name]
    if not lines:
        raise SchemaError(f"missing header {','.join(expected)}", path, 1)
    header = lines[0].rstrip("\r").split(",")
    if tuple(header) != expected:
        raise SchemaError(f"header {','.join(header)!r} does not match {','.join(expected)!r}", path, 1)
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line:
            continue
        cells = line.split(",")
        if len(cells) > len(expected):
            raise SchemaError(
                f"expected {len(expected)} fields, found {len(cells)} (decimal commas are not supported)",
                path, k, len(expected),
            )
        if len(cells) < len(expected):
            raise SchemaError(f"expected {len(expected)} fields, found {len(cells)}", path, k)
        rows.append((k, cells))
    return rows


def _number(cell: str, path: Path, line: int, column: int, allow_empty: bool = False) -> float | None:
    if cell == "" and allow_empty:
        return None
    if not NUMBER_RE.match(cell):
        raise SchemaError(f"invalid number {cell!r}", path, line, column)
    return float(cell)


def _code(cell: str, path: Path, line: int, column: int) -> str:
    if not CODE_RE.match(cell):
        raise SchemaError(f"invalid code {cell!r}; expected [A-Z0-9_]+", path, line, column)
    return cell


def read_nodes(path: Path) -> tuple[list[str], tuple[NodeIndex, ...]]:
    ids, nodes = [], []
    for line, (node_id, country, sector, group) in _read_rows(path):
        _code(node_id, path, line, 1)
        _code(country, path, line, 2)
        _code(sector, path, line, 3)
        try:
            grp = SectorGroup(group)
        except ValueError:
            raise SchemaError(f"unknown sector group {group!r}", path, line, 4) from None
        if node_id in ids:
            raise SchemaError(f"duplicate node_id {node_id}", path, line, 1)
        ids.append(node_id)
        nodes.append(NodeIndex(country, sector, grp))
    if not nodes:
        raise SchemaError("no nodes defined", path)
    return ids, tuple(nodes)


def _read_year(ydir: Path, year: int, ids: Sequence[str], nodes: tuple[NodeIndex, ...]) -> ICIOTable:
    pos = {n: k for k, n in enumerate(ids)}
    countries = list(dict.fromkeys(n.country for n in nodes))
    cpos = {c: k for k, c in enumerate(countries)}
    m, g = len(nodes), len(countries)

    def node(cell, path, line, column):
        if cell not in pos:
            raise UnknownNodeError(f"node {cell!r} is not defined in nodes.csv", path, line, column)
        return pos[cell]

    Z = np.zeros((m, m))
    path = ydir / "z.csv"
    seen = set()
    for line, (r, c, v) in _read_rows(path):
        i, j = node(r, path, line, 1), node(c, path, line, 2)
        if (i, j) in seen:
            raise SchemaError(f"duplicate entry for ({r}, {c})", path, line)
        seen.add((i, j))
        Z[i, j] = _number(v, path, line, 3)

    F = np.zeros((m, g))
    path = ydir / "final.csv"
    seen = set()
    for line, (r, d, v) in _read_rows(path):
        i = node(r, path, line, 1)
        if d not in cpos:
            raise UnknownNodeError(f"destination country {d!r} has no nodes in nodes.csv", path, line, 2)
        if (i, cpos[d]) in seen:
            raise SchemaError(f"duplicate entry for ({r}, {d})", path, line)
        seen.add((i, cpos[d]))
        F[i, cpos[d]] = _number(v, path, line, 3)

    def vector(path):
        out = np.full(m, np.nan)
        for line, (n, v) in _read_rows(path):
            i = node(n, path, line, 1)
            if not np.isnan(out[i]):
                raise SchemaError(f"duplicate entry for {n}", path, line)
            out[i] = _number(v, path, line, 2)
        missing = [ids[i] for i in np.flatnonzero(np.isnan(out))]
        if missing:
            raise SchemaError(f"no value for nodes {missing}", path)
        return out

    va = vector(ydir / "va.csv")
    out_path = ydir / "output.csv"
    x = vector(out_path) if out_path.exists() else Z.sum(axis=1) + F.sum(axis=1)
    return ICIOTable(nodes, Z, F, va, x, year)


def read_indicators(path: Path) -> list[IndicatorRow]:
    rows = []
    seen = set()
    for line, (country, year, ip, rd, pop) in _read_rows(path):
        _code(country, path, line, 1)
        if not re.fullmatch(r"\d{4}", year):
            raise SchemaError(f"invalid year {year!r}", path, line, 2)
        key = (country, int(year))
        if key in seen:
            raise SchemaError(f"duplicate row for {country} {year}", path, line)
        seen.add(key)
        vals = [_number(cell, path, line, col, allow_empty=True) for col, cell in ((3, ip), (4, rd), (5, pop))]
        for col, val in zip((3, 4, 5), vals):
            if val is not None and val < 0:
                raise SchemaError(f"negative value {val}", path, line, col)
        rows.append(IndicatorRow(country, int(year), *vals))
    return rows


def check_manifest(root: Path) -> None:
    path = root / "manifest.txt"
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError("file not found", path) from None
    except UnicodeDecodeError:
        raise SchemaError("file is not valid UTF-8", path) from None
    entries = dict(l.split("=", 1) for l in text.splitlines() if "=" in l)
    if entries.get("format_version") != str(FORMAT_VERSION):
        raise SchemaError(f"unsupported format_version {entries.get('format_version')!r}", path)


def read_dataset(root, strict: bool = False) -> Dataset:
    """Load every year of a dataset and validate it.

    Validation is lenient by default and the reports are kept on the
    returned dataset; ``strict=True`` raises :class:`TableValidationError`
    on the first year with violations.
    """
    root = Path(root)
    if not root.is_dir():
        raise SchemaError("dataset directory not found", root)
    check_manifest(root)
    ids, nodes = read_nodes(root / "nodes.csv")
    tables, reports = {}, {}
    year_dirs = sorted(p for p in root.iterdir() if p.is_dir() and YEAR_DIR_RE.match(p.name))
    if not year_dirs:
        raise SchemaError("no year=YYYY directories", root)
    mode = Mode.STRICT if strict else Mode.LENIENT
    for ydir in year_dirs:
        year = int(YEAR_DIR_RE.match(ydir.name).group(1))
        try:
            table = _read_year(ydir, year, ids, nodes)
        except StructuralError as exc:
            raise SchemaError(str(exc), ydir) from None
        report = validate_table(table, mode)
        if strict and not report.ok:
            raise TableValidationError(f"{ydir}: {len(report.violations)} violation(s)", report)
        tables[year] = table
        reports[year] = report
    ind_path = root / "indicators.csv"
    indicators = read_indicators(ind_path) if ind_path.exists() else []
    return Dataset(root, nodes, tables, indicators, reports)


def node_ids(nodes: Sequence[NodeIndex]) -> list[str]:
    return [n.label for n in nodes]


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_dataset(
    root,
    tables: Iterable[ICIOTable],
    indicators: Iterable[IndicatorRow] = (),
    force: bool = False,
    write_output: bool = True,
) -> Path:
    """Write ``tables`` (all sharing one node list) and ``indicators``.

    An existing non-empty ``root`` is refused unless ``force`` is set, in
    which case only files belonging to this format are replaced.
    """
    root = Path(root)
    tables = sorted(tables, key=lambda t: t.year)
    if not tables:
        raise ValueError("need at least one table")
    nodes = tables[0].nodes
    for t in tables[1:]:
        if t.nodes != nodes:
            raise ValueError(f"table for {t.year} has a different node list")
    if len({t.year for t in tables}) != len(tables):
        raise ValueError("duplicate table years")
    if root.exists() and any(root.iterdir()):
        if not force:
            raise DatasetExistsError(f"{root} exists and is not empty; use force to overwrite")
        for p in root.iterdir():
            if p.is_dir() and YEAR_DIR_RE.match(p.name):
                shutil.rmtree(p)
            elif p.name in HEADERS or p.name == "manifest.txt":
                p.unlink()
    root.mkdir(parents=True, exist_ok=True)

    ids = node_ids(nodes)
    (root / "manifest.txt").write_text(f"format_version={FORMAT_VERSION}\n", encoding="utf-8", newline="\n")
    _write(root / "nodes.csv", HEADERS["nodes.csv"], ([i, n.country, n.sector, n.group.value] for i, n in zip(ids, nodes)))
    for t in tables:
        ydir = root / f"year={t.year:04d}"
        ydir.mkdir()
        _write(
            ydir / "z.csv",
            HEADERS["z.csv"],
            ([ids[i], ids[j], fmt(t.Z[i, j])] for i in range(t.size) for j in range(t.size) if t.Z[i, j] != 0),
        )
        _write(
            ydir / "final.csv",
            HEADERS["final.csv"],
            ([ids[i], c, fmt(t.F[i, r])] for i in range(t.size) for r, c in enumerate(t.countries) if t.F[i, r] != 0),
        )
        _write(ydir / "va.csv", HEADERS["va.csv"], ([ids[i], fmt(t.va[i])] for i in range(t.size)))
        if write_output:
            _write(ydir / "output.csv", HEADERS["output.csv"], ([ids[i], fmt(t.x[i])] for i in range(t.size)))

    def cell(v):
        return "" if v is None else fmt(v)

    rows = sorted(indicators, key=lambda r: (r.year, r.country))
    _write(
        root / "indicators.csv",
        HEADERS["indicators.csv"],
        ([r.country, str(r.year), cell(r.ip_receipts_pct_gdp), cell(r.rd_pct_gdp), cell(r.population)] for r in rows),
    )
    return root


SYNTH_GROUPS = (
    SectorGroup.MANUFACTURING,
    SectorGroup.PRIMARY,
    SectorGroup.BUSINESS_SERVICES,
    SectorGroup.OTHER_SERVICES,
)


@dataclass(frozen=True)
class SynthParams:
    countries: int = 3
    sectors_per_country: int = 2
    seed: int = 0
    openness: float = 0.2
    max_col_sum: float = 0.6
    year: int = 2000

    def __post_init__(self):
        if self.countries < 1 or self.sectors_per_country < 1:
            raise ValueError("countries and sectors_per_country must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0.0 <= self.openness <= 0.5:
            raise ValueError(f"openness must lie in [0, 0.5], got {self.openness}")
        if not 0.0 < self.max_col_sum <= 0.9:
            raise ValueError(f"max_col_sum must lie in (0, 0.9], got {self.max_col_sum}")


def synth_nodes(countries: int, sectors: int) -> tuple[NodeIndex, ...]:
    return tuple(
        NodeIndex(f"C{c + 1:02d}", f"S{k + 1}", SYNTH_GROUPS[k % len(SYNTH_GROUPS)])
        for c in range(countries)
        for k in range(sectors)
    )


def synth_economy(params: SynthParams) -> ICIOTable:
    """Random balanced table, deterministic in ``(seed, year)``.

    Each column of ``A`` gets a total drawn from ``(0.1, 1] * max_col_sum``,
    of which a fraction ``openness`` is spread over foreign suppliers.
    Cross-border final demand is likewise scaled by ``openness``, so
    ``openness=0`` yields an autarkic table.
    """
    rng = np.random.default_rng([params.seed, params.year])
    G, N = params.countries, params.sectors_per_country
    nodes = synth_nodes(G, N)
    m = G * N
    home = np.repeat(np.arange(G), N)
    same = home[:, None] == home[None, :]
    foreign_share = params.openness if G > 1 else 0.0

    raw = rng.uniform(0.0, 1.0, size=(m, m))
    totals = params.max_col_sum * rng.uniform(0.1, 1.0, size=m)
    dom = np.where(same, raw, 0.0)
    fgn = np.where(same, 0.0, raw)
    A = dom / dom.sum(axis=0) * (1.0 - foreign_share) * totals
    if foreign_share > 0:
        A += fgn / fgn.sum(axis=0) * foreign_share * totals

    dest = rng.uniform(0.0, 1.0, size=(m, G))
    own = home[:, None] == np.arange(G)[None, :]
    F = np.where(own, 50.0 + 100.0 * dest, 0.0)
    if foreign_share > 0:
        F += np.where(own, 0.0, 100.0 * foreign_share * dest / (G - 1))
    return build_table(nodes, A, F, params.year)


def synth_indicators(params: SynthParams, years: Sequence[int]) -> list[IndicatorRow]:
    """Seeded innovation and population figures for ``synth_nodes`` countries."""
    rows = []
    for year in years:
        rng = np.random.default_rng([params.seed, year, 1])
        for c in range(params.countries):
            ip, rd, logpop = rng.uniform(0.0, 0.3), rng.uniform(0.0, 3.0), rng.uniform(5.0, 9.0)
            rows.append(IndicatorRow(f"C{c + 1:02d}", int(year), ip, rd, float(round(10**logpop))))
    return rows


def synth_dataset(params: SynthParams, years: Sequence[int]) -> tuple[list[ICIOTable], list[IndicatorRow]]:
    tables = [synth_economy(SynthParams(**{**params.__dict__, "year": int(y)})) for y in years]
    return tables, synth_indicators(params, years)


def indicator_rows(external: Mapping[str, object], year: int) -> list[IndicatorRow]:
    """Convert ``{country: ExternalIndicators}`` into rows for ``write_dataset``."""
    return [
        IndicatorRow(c, year, e.ip_receipts_pct_gdp, e.rd_pct_gdp, e.population)
        for c, e in external.items()
    ]

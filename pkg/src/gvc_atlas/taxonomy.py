"""Four-bucket (six-label) GVC taxonomy with size adjustment and transitions.

Rules are applied in a fixed order and every comparison is recorded:

1. Commodities gate: manufacturing share of DVA ``< 0.60`` and backward
   manufacturing ``<`` a size-specific cap (0.20 / 0.10 / 0.075). When it
   fires, the primary-goods share picks the label: ``< 0.20`` low
   participation, ``[0.20, 0.40)`` limited commodities, ``>= 0.40`` high
   commodities.
2. Innovative activities: IP receipts and R&D (percent of GDP) both at or
   above the size-specific floors (0.15 / 1.5 small, 0.1 / 1.0 otherwise).
3. Advanced manufacturing and services: manufacturing plus business
   services share of DVA ``>= 0.80``.
4. Everything else is limited manufacturing.
"""

from __future__ import annotations

import enum
import math
import operator
from collections import defaultdict
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ICIOTable, SectorGroup
from .decompose import NO_EXPORTS, Attribution, ExportDecomposition, accounts
from .errors import ConfigError, PanelError


class SizeClass(str, enum.Enum):
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


class Bucket(str, enum.Enum):
    LOW_PARTICIPATION = "LowParticipation"
    LIMITED_COMMODITIES = "LimitedCommodities"
    HIGH_COMMODITIES = "HighCommodities"
    LIMITED_MANUFACTURING = "LimitedManufacturing"
    ADVANCED_MANUF_SERVICES = "AdvancedManufServices"
    INNOVATIVE_ACTIVITIES = "InnovativeActivities"


BUCKET_ORDER = tuple(Bucket)


@dataclass(frozen=True)
class SizeCutoffs:
    """Population cutoffs: Small below ``lower``, Large at or above ``upper``."""

    lower: float = 10_000_000
    upper: float = 40_000_000

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ConfigError("size cutoffs must be finite")
        if not 0 < self.lower < self.upper:
            raise ConfigError(f"size cutoffs must satisfy 0 < lower < upper, got {self.lower}, {self.upper}")


def size_class(population: float, cutoffs: SizeCutoffs = SizeCutoffs()) -> SizeClass:
    if population < 0 or math.isnan(population):
        raise ValueError(f"population must be >= 0, got {population}")
    if population < cutoffs.lower:
        return SizeClass.SMALL
    if population < cutoffs.upper:
        return SizeClass.MEDIUM
    return SizeClass.LARGE


@dataclass(frozen=True)
class Thresholds:
    commodities_manuf_max: float = 0.60
    backward_max_small: float = 0.20
    backward_max_medium: float = 0.10
    backward_max_large: float = 0.075
    primary_low: float = 0.20
    primary_high: float = 0.40
    innov_ip_small: float = 0.15
    innov_rd_small: float = 1.5
    innov_ip_large: float = 0.1
    innov_rd_large: float = 1.0
    advanced_min: float = 0.80

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise ConfigError(f"threshold {f.name} must be a finite non-negative number, got {value!r}")
        if not self.primary_low < self.primary_high:
            raise ConfigError("primary_low must be below primary_high")

    def backward_max(self, size: SizeClass) -> float:
        return {
            SizeClass.SMALL: self.backward_max_small,
            SizeClass.MEDIUM: self.backward_max_medium,
            SizeClass.LARGE: self.backward_max_large,
        }[SizeClass(size)]

    def innovation_floors(self, size: SizeClass) -> tuple[float, float]:
        if SizeClass(size) is SizeClass.SMALL:
            return self.innov_ip_small, self.innov_rd_small
        return self.innov_ip_large, self.innov_rd_large


@dataclass(frozen=True)
class TaxonomyConfig:
    thresholds: Thresholds = Thresholds()
    cutoffs: SizeCutoffs = SizeCutoffs()

    def as_dict(self) -> dict:
        d = asdict(self.thresholds)
        d["size_lower"] = self.cutoffs.lower
        d["size_upper"] = self.cutoffs.upper
        return d


def _check_share(name, value, upper=1.0):
    if not isinstance(value, (int, float)) or math.isnan(value) or not 0.0 <= value <= upper:
        raise PanelError(f"{name} must lie in [0, {upper}], got {value!r}")


@dataclass(frozen=True)
class CountryIndicators:
    country: str
    year: int
    manuf_dva_share: float
    biz_services_dva_share: float
    primary_dva_share: float
    backward_manuf_share: float
    ip_receipts_pct_gdp: float
    rd_pct_gdp: float
    population: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("manuf_dva_share", "biz_services_dva_share", "primary_dva_share", "backward_manuf_share"):
            _check_share(name, getattr(self, name))
        total = self.manuf_dva_share + self.biz_services_dva_share + self.primary_dva_share
        if total > 1 + 1e-9:
            raise PanelError(f"{self.country} {self.year}: group DVA shares sum to {total} > 1")
        for name in ("ip_receipts_pct_gdp", "rd_pct_gdp", "population"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise PanelError(f"{self.country} {self.year}: {name} must be a finite value >= 0, got {value!r}")


_OPS = {"<": operator.lt, ">=": operator.ge}


@dataclass(frozen=True)
class RuleEval:
    """One comparison ``value op threshold`` and its outcome."""

    rule: str
    value: float
    op: str
    threshold: float
    verdict: bool

    def replay(self) -> bool:
        if self.op == "residual":
            return True
        return _OPS[self.op](self.value, self.threshold)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BucketAssignment:
    country: str
    year: int
    bucket: Bucket
    size_class: SizeClass
    trace: tuple[RuleEval, ...] = ()


def _decide(verdicts: Mapping[str, bool]) -> Bucket:
    if verdicts["commodities.manuf_share"] and verdicts["commodities.backward_manuf"]:
        if verdicts["commodities.primary_low"]:
            return Bucket.LOW_PARTICIPATION
        if verdicts["commodities.primary_high"]:
            return Bucket.HIGH_COMMODITIES
        return Bucket.LIMITED_COMMODITIES
    if verdicts["innovative.ip_receipts"] and verdicts["innovative.rd"]:
        return Bucket.INNOVATIVE_ACTIVITIES
    if verdicts["advanced.manuf_biz_share"]:
        return Bucket.ADVANCED_MANUF_SERVICES
    return Bucket.LIMITED_MANUFACTURING


def classify(ind: CountryIndicators, size: SizeClass, thresholds: Thresholds = Thresholds()) -> BucketAssignment:
    size = SizeClass(size)
    trace: list[RuleEval] = []
    verdicts: dict[str, bool] = {}

    def check(rule, value, op, threshold):
        verdict = bool(_OPS[op](value, threshold))
        trace.append(RuleEval(rule, float(value), op, float(threshold), verdict))
        verdicts[rule] = verdict
        return verdict

    gate_manuf = check("commodities.manuf_share", ind.manuf_dva_share, "<", thresholds.commodities_manuf_max)
    gate_bwd = check("commodities.backward_manuf", ind.backward_manuf_share, "<", thresholds.backward_max(size))
    if gate_manuf and gate_bwd:
        if not check("commodities.primary_low", ind.primary_dva_share, "<", thresholds.primary_low):
            check("commodities.primary_high", ind.primary_dva_share, ">=", thresholds.primary_high)
    else:
        ip_floor, rd_floor = thresholds.innovation_floors(size)
        ip_ok = check("innovative.ip_receipts", ind.ip_receipts_pct_gdp, ">=", ip_floor)
        rd_ok = check("innovative.rd", ind.rd_pct_gdp, ">=", rd_floor)
        if not (ip_ok and rd_ok):
            mb = ind.manuf_dva_share + ind.biz_services_dva_share
            if not check("advanced.manuf_biz_share", mb, ">=", thresholds.advanced_min):
                trace.append(RuleEval("limited_manufacturing", 0.0, "residual", 0.0, True))
    return BucketAssignment(ind.country, ind.year, _decide(_Lazy(verdicts)), size, tuple(trace))


class _Lazy(dict):
    # rules skipped by short-circuiting read as False
    def __missing__(self, key):
        return False


def replay_trace(trace: Sequence[RuleEval]) -> Bucket:
    """Re-evaluate every recorded comparison and re-derive the bucket.

    Raises ``ValueError`` if a recorded verdict disagrees with its operands.
    """
    verdicts = _Lazy()
    for rec in trace:
        rec = rec if isinstance(rec, RuleEval) else RuleEval(**rec)
        again = rec.replay()
        if again != rec.verdict:
            raise ValueError(f"trace record {rec.rule} does not replay: {rec.value} {rec.op} {rec.threshold}")
        verdicts[rec.rule] = again
    return _decide(verdicts)


def classify_panel(panel: Iterable[CountryIndicators], config: TaxonomyConfig = TaxonomyConfig()) -> list[BucketAssignment]:
    rows = list(panel)
    seen: set[tuple[str, int]] = set()
    for r in rows:
        key = (r.country, r.year)
        if key in seen:
            raise PanelError(f"duplicate indicator row for country {r.country} year {r.year}")
        seen.add(key)
    return [classify(r, size_class(r.population, config.cutoffs), config.thresholds) for r in rows]


@dataclass(frozen=True)
class Move:
    from_bucket: Bucket
    to_bucket: Bucket
    from_year: int
    to_year: int


@dataclass(frozen=True)
class TransitionReport:
    country: str
    steps: tuple[tuple[int, Bucket], ...]
    moves: tuple[Move, ...]


def transitions(assignments: Iterable[BucketAssignment]) -> list[TransitionReport]:
    """Chronological bucket history and moves per country, sorted by country."""
    by_country: dict[str, list[tuple[int, Bucket]]] = defaultdict(list)
    for a in assignments:
        by_country[a.country].append((a.year, Bucket(a.bucket)))
    reports = []
    for country in sorted(by_country):
        steps = sorted(by_country[country], key=lambda s: s[0])
        moves = tuple(
            Move(b0, b1, y0, y1) for (y0, b0), (y1, b1) in zip(steps, steps[1:]) if b0 is not b1
        )
        reports.append(TransitionReport(country, tuple(steps), moves))
    return reports


def transition_matrix(pairs: Iterable[tuple[Bucket, Bucket]]) -> np.ndarray:
    """6x6 counts, rows = origin bucket, columns = destination, in ``BUCKET_ORDER``."""
    pos = {b: k for k, b in enumerate(BUCKET_ORDER)}
    counts = np.zeros((len(BUCKET_ORDER), len(BUCKET_ORDER)), dtype=np.int64)
    for a, b in pairs:
        counts[pos[Bucket(a)], pos[Bucket(b)]] += 1
    return counts


@dataclass(frozen=True)
class ExternalIndicators:
    ip_receipts_pct_gdp: float | None
    rd_pct_gdp: float | None
    population: float | None


@dataclass(frozen=True)
class IndicatorGap:
    country: str
    year: int
    reason: str


def indicators_from_table(
    table: ICIOTable,
    external: Mapping[str, ExternalIndicators],
    attribution: Attribution | str = Attribution.EXPORT_PRODUCT,
) -> tuple[list[CountryIndicators], list[IndicatorGap]]:
    """Taxonomy inputs for every country of ``table``.

    Export-based shares come from the table (export-product attribution by
    default);
    innovation and population figures from ``external``. Countries with any
    external field missing are returned as gaps instead of indicator rows.
    """
    acc = accounts(table)
    rows, gaps = [], []
    for c in table.countries:
        ext = external.get(c)
        if ext is None:
            gaps.append(IndicatorGap(c, table.year, "no external indicator row"))
            continue
        missing = [k for k in ("ip_receipts_pct_gdp", "rd_pct_gdp", "population") if getattr(ext, k) is None]
        if missing:
            gaps.append(IndicatorGap(c, table.year, "missing " + ", ".join(missing)))
            continue
        groups = acc.dva_by_group(c, attribution)

        def share(g):
            return min(max(groups[g].share, 0.0), 1.0) if g in groups else 0.0

        flags = (NO_EXPORTS,) if acc.gross_exports(c) <= 0 else ()
        rows.append(
            CountryIndicators(
                country=c,
                year=table.year,
                manuf_dva_share=share(SectorGroup.MANUFACTURING),
                biz_services_dva_share=share(SectorGroup.BUSINESS_SERVICES),
                primary_dva_share=share(SectorGroup.PRIMARY),
                backward_manuf_share=min(max(acc.backward_manufacturing_share(c), 0.0), 1.0),
                ip_receipts_pct_gdp=float(ext.ip_receipts_pct_gdp),
                rd_pct_gdp=float(ext.rd_pct_gdp),
                population=float(ext.population),
                flags=flags,
            )
        )
    return rows, gaps


@dataclass(frozen=True)
class BucketMean:
    bucket: Bucket
    countries: int
    backward_share: float
    forward_share: float
    gvc_share: float


def bucket_means(
    assignments: Iterable[BucketAssignment],
    decompositions: Mapping[tuple[str, int], ExportDecomposition],
    weighting: str = "none",
) -> list[BucketMean]:
    """Mean participation per bucket, unweighted or weighted by gross exports.

    Buckets with no members are omitted; output follows ``BUCKET_ORDER``.
    """
    if weighting not in ("none", "export"):
        raise ValueError(f"weighting must be 'none' or 'export', got {weighting!r}")
    members: dict[Bucket, list[ExportDecomposition]] = defaultdict(list)
    for a in assignments:
        d = decompositions.get((a.country, a.year))
        if d is not None:
            members[a.bucket].append(d)
    out = []
    for b in BUCKET_ORDER:
        ds = members.get(b)
        if not ds:
            continue
        if weighting == "export":
            w = np.array([d.gross_exports for d in ds])
        else:
            w = np.ones(len(ds))
        if w.sum() <= 0:
            w = np.ones(len(ds))
        w = w / w.sum()
        bwd = float(np.dot(w, [d.backward_share for d in ds]))
        fwd = float(np.dot(w, [d.forward_share for d in ds]))
        out.append(BucketMean(b, len(ds), bwd, fwd, bwd + fwd))
    return out

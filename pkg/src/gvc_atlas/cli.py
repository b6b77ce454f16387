"""Command-line entry point: ``gvc-atlas <command> ...``.

Exit codes: 0 success, 1 domain violations (failed validation, suppressed
countries under ``--require-complete``), 2 usage, structural or I/O errors.

Every command writes a run manifest. Its path is ``--manifest`` when given,
otherwise ``<out>.manifest.json`` next to ``--out``, otherwise
``gvc_<command>.manifest.json`` in the working directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, fields
from pathlib import Path

from . import __version__
from .core import BALANCE_RTOL, Mode, validate_table
from .decompose import GVC_SHARE_DEFINITION, Attribution, accounts, participation_series
from .errors import ConfigError, GVCError, TableValidationError
from .ingest import SynthParams, fmt, read_dataset, synth_dataset, write_dataset
from .manifest import RunManifest, dataset_digests, sha256_bytes
from .taxonomy import (
    BUCKET_ORDER,
    SizeCutoffs,
    TaxonomyConfig,
    Thresholds,
    bucket_means,
    classify_panel,
    indicators_from_table,
    transition_matrix,
    transitions,
)

CONFIG_ENV = "GVC_ATLAS_CONFIG"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# config
# --------------------------------------------------------------------------

THRESHOLD_KEYS = tuple(f.name for f in fields(Thresholds))
CONFIG_KEYS = THRESHOLD_KEYS + ("size_lower", "size_upper", "attribution", "tolerance")


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key=value`` text; ``#`` starts a comment."""
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        if key == "attribution":
            try:
                values[key] = Attribution(value).value
            except ValueError:
                raise ConfigError(f"{source}:{n}: unknown attribution {value!r}") from None
            continue
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigError(f"{source}:{n}: {key} must be a number, got {value!r}") from None
    return values


class RunConfig:
    def __init__(self, values: dict | None = None):
        values = dict(values or {})
        self.thresholds = Thresholds(**{k: values[k] for k in THRESHOLD_KEYS if k in values})
        default = SizeCutoffs()
        self.cutoffs = SizeCutoffs(values.get("size_lower", default.lower), values.get("size_upper", default.upper))
        self.attribution = Attribution(values.get("attribution", Attribution.EXPORT_PRODUCT.value))
        self.tolerance = float(values.get("tolerance", BALANCE_RTOL))

    @property
    def taxonomy(self) -> TaxonomyConfig:
        return TaxonomyConfig(self.thresholds, self.cutoffs)

    def as_dict(self) -> dict:
        d = self.taxonomy.as_dict()
        d["attribution"] = self.attribution.value
        d["tolerance"] = self.tolerance
        return d


def load_config(path: str | None) -> tuple[RunConfig, dict[str, str]]:
    """Resolve config from ``$GVC_ATLAS_CONFIG`` then ``path``; later wins."""
    values: dict = {}
    digests: dict[str, str] = {}
    for source in (os.environ.get(CONFIG_ENV), path):
        if not source:
            continue
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc.strerror}") from None
        values.update(parse_config(data.decode("utf-8"), source))
        digests[f"config:{source}"] = sha256_bytes(data)
    return RunConfig(values), digests


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _num(v):
    return "" if v is None else fmt(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


class Run:
    """Collects outputs of one command and writes them plus the manifest."""

    def __init__(self, args, command: str, config: RunConfig | None = None, inputs: dict | None = None):
        self.args = args
        self.command = command
        self.config = config
        self.inputs = dict(inputs or {})
        self.outputs: dict[str, str] = {}
        self.extra_config: dict = {}

    def emit(self, text: str, path: str | None = None, name: str = "output"):
        data = text.encode("utf-8")
        target = path if path is not None else getattr(self.args, "out", None)
        if target:
            Path(target).write_bytes(data)
        else:
            sys.stdout.write(text)
        self.outputs[name] = sha256_bytes(data)

    def manifest_path(self) -> Path:
        if getattr(self.args, "manifest", None):
            return Path(self.args.manifest)
        out = getattr(self.args, "out", None)
        if out:
            return Path(str(Path(out)) + ".manifest.json")
        return Path(f"gvc_{self.command}.manifest.json")

    def finish(self) -> RunManifest:
        cfg = self.config.as_dict() if self.config else {}
        cfg.update(self.extra_config)
        m = RunManifest(self.command, cfg, self.inputs, self.outputs)
        m.write(self.manifest_path())
        return m


def _load(args, strict: bool = False):
    config, cfg_digests = load_config(getattr(args, "thresholds", None) or getattr(args, "config", None))
    ds = read_dataset(args.dataset, strict=strict)
    inputs = dataset_digests(Path(args.dataset))
    inputs.update(cfg_digests)
    return config, ds, inputs


def _parse_years(text: str | None, available) -> list[int]:
    if not text:
        return sorted(available)
    years = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(p) for p in part.split("-", 1))
            years.extend(y for y in available if lo <= y <= hi)
        elif part:
            years.append(int(part))
    missing = [y for y in years if y not in available]
    if missing:
        raise UsageError(f"years {missing} not in dataset (available: {sorted(available)})")
    return sorted(set(years))


def _classify_years(ds, years, config: RunConfig):
    assignments, gaps = [], []
    for y in years:
        rows, g = indicators_from_table(ds.tables[y], ds.external_for(y), config.attribution)
        assignments.extend(classify_panel(rows, config.taxonomy))
        gaps.extend(g)
    return assignments, gaps


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    config, cfg_digests = load_config(args.config)
    ds = read_dataset(args.dataset, strict=False)
    run = Run(args, "validate", config, {**dataset_digests(Path(args.dataset)), **cfg_digests})
    run.extra_config["mode"] = "strict" if args.strict else "lenient"
    mode = Mode.STRICT if args.strict else Mode.LENIENT
    lines, records, n_bad = [], [], 0
    for year in ds.years:
        report = validate_table(ds.tables[year], mode, config.tolerance)
        for v in report.violations:
            n_bad += 1
            lines.append(f"year={year} {v}")
            records.append({"year": year, "kind": v.kind, "node": v.node, "magnitude": v.magnitude, "detail": v.detail})
        for w in report.warnings:
            print(f"warning: year={year} {w}", file=sys.stderr)
    if args.format == "json":
        run.emit(_json_text({"mode": mode.value, "ok": n_bad == 0, "violations": records}))
    else:
        run.emit("".join(line + "\n" for line in lines))
    run.finish()
    return EXIT_OK if n_bad == 0 else EXIT_VIOLATION


SERIES_HEADER = ("country", "year", "backward_share", "forward_share", "gvc_share", "gross_exports")


def cmd_participation(args) -> int:
    config, ds, inputs = _load(args)
    years = _parse_years(args.years, ds.tables)
    run = Run(args, "participation", config, inputs)
    run.extra_config["weighting"] = args.weighting
    run.extra_config["gvc_share_definition"] = GVC_SHARE_DEFINITION
    series = participation_series([ds.tables[y] for y in years])

    summary = None
    if args.weighting:
        decomps = {}
        for y in years:
            acc = accounts(ds.tables[y])
            decomps.update({(c, y): acc.decomposition(c) for c in ds.tables[y].countries})
        assignments, _ = _classify_years(ds, years, config)
        summary = []
        for y in years:
            for bm in bucket_means([a for a in assignments if a.year == y], decomps, args.weighting):
                summary.append((y, bm))

    if args.format == "json":
        body = {
            "metadata": {"gvc_share_definition": GVC_SHARE_DEFINITION, "years": years},
            "series": [
                {k: getattr(p, k) for k in SERIES_HEADER} for p in series
            ],
        }
        if summary is not None:
            body["bucket_means"] = [
                {"year": y, "bucket": bm.bucket.value, "countries": bm.countries, "weighting": args.weighting,
                 "backward_share": bm.backward_share, "forward_share": bm.forward_share, "gvc_share": bm.gvc_share}
                for y, bm in summary
            ]
        run.emit(_json_text(body))
    else:
        text = _csv_text(
            SERIES_HEADER,
            ([p.country, str(p.year), _num(p.backward_share), _num(p.forward_share), _num(p.gvc_share), _num(p.gross_exports)]
             for p in series),
        )
        run.emit(text)
        if summary is not None:
            stext = _csv_text(
                ("year", "bucket", "countries", "weighting", "backward_share", "forward_share", "gvc_share"),
                ([str(y), bm.bucket.value, str(bm.countries), args.weighting, fmt(bm.backward_share),
                  fmt(bm.forward_share), fmt(bm.gvc_share)] for y, bm in summary),
            )
            if args.out:
                out = Path(args.out)
                run.emit(stext, str(out.with_name(out.stem + "_buckets.csv")), name="buckets")
            else:
                sys.stdout.write("\n")
                run.emit(stext, name="buckets")
    run.finish()
    return EXIT_OK


def cmd_classify(args) -> int:
    config, ds, inputs = _load(args)
    years = [args.year] if args.year is not None else ds.years
    if args.year is not None and args.year not in ds.tables:
        raise UsageError(f"year {args.year} not in dataset (available: {ds.years})")
    run = Run(args, "classify", config, inputs)
    assignments, gaps = _classify_years(ds, years, config)
    for g in gaps:
        print(f"suppressed: {g.country} {g.year}: {g.reason}", file=sys.stderr)
    run.extra_config["suppressed"] = [asdict(g) for g in gaps]

    if args.format == "json":
        rows = []
        for a in assignments:
            row = {"country": a.country, "year": a.year, "bucket": a.bucket.value, "size_class": a.size_class.value}
            if args.trace:
                row["trace"] = [r.as_dict() for r in a.trace]
            rows.append(row)
        run.emit(_json_text({"assignments": rows, "suppressed": [asdict(g) for g in gaps]}))
    else:
        header = ["country", "year", "bucket", "size_class"] + (["trace"] if args.trace else [])
        out_rows = []
        for a in assignments:
            row = [a.country, str(a.year), a.bucket.value, a.size_class.value]
            if args.trace:
                row.append(json.dumps([r.as_dict() for r in a.trace], separators=(",", ":")))
            out_rows.append(row)
        run.emit(_csv_text(header, out_rows))
    run.finish()
    if gaps and args.require_complete:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_transitions(args) -> int:
    config, ds, inputs = _load(args)
    if len(ds.years) < 2:
        raise UsageError(f"transitions need at least two years; dataset has {ds.years}")
    for y in (args.from_year, args.to_year):
        if y not in ds.tables:
            raise UsageError(f"year {y} not in dataset (available: {ds.years})")
    run = Run(args, "transitions", config, inputs)
    pairs, unmatched = [], []
    if args.from_year == args.to_year:
        assignments, gaps = _classify_years(ds, [args.from_year], config)
        rows = [(a.country, a.bucket, a.bucket) for a in sorted(assignments, key=lambda a: a.country)]
    else:
        assignments, gaps = _classify_years(ds, [args.from_year, args.to_year], config)
        rows = []
        for rep in transitions(assignments):
            years = dict(rep.steps)
            if args.from_year in years and args.to_year in years:
                rows.append((rep.country, years[args.from_year], years[args.to_year]))
            else:
                unmatched.append(rep.country)
    pairs = [(b0, b1) for _, b0, b1 in rows]
    matrix = transition_matrix(pairs)
    body = {
        "from_year": args.from_year,
        "to_year": args.to_year,
        "buckets": [b.value for b in BUCKET_ORDER],
        "countries": [{"country": c, "from_bucket": b0.value, "to_bucket": b1.value} for c, b0, b1 in rows],
        "matrix": matrix.tolist(),
        "unmatched": unmatched,
        "suppressed": [asdict(g) for g in gaps],
    }
    run.emit(_json_text(body))
    run.finish()
    return EXIT_OK


def cmd_decompose(args) -> int:
    config, ds, inputs = _load(args)
    if args.year not in ds.tables:
        raise UsageError(f"year {args.year} not in dataset (available: {ds.years})")
    table = ds.tables[args.year]
    if args.country not in table.countries:
        raise UsageError(f"unknown country {args.country!r}; dataset has {list(table.countries)}")
    run = Run(args, "decompose", config, inputs)
    acc = accounts(table)
    d = acc.decomposition(args.country)
    s = acc.index(args.country)
    col_gap = abs(float(acc.vax[:, s].sum()) - d.gross_exports)
    body = d.as_dict()
    body.update(
        {
            "year": args.year,
            "identity_residual": d.identity_residual,
            "column_sum_residual": col_gap / d.gross_exports if d.gross_exports > 0 else col_gap,
            "leontief_residual": acc.residual_norm,
            "gvc_share_definition": GVC_SHARE_DEFINITION,
        }
    )
    run.emit(_json_text(body))
    run.finish()
    return EXIT_OK


def cmd_synth(args) -> int:
    years = [int(y) for y in args.years.split(",") if y.strip()]
    if not years:
        raise UsageError("--years must list at least one year")
    try:
        params = SynthParams(args.countries, args.sectors, args.seed, args.openness, args.max_col_sum, years[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tables, indicators = synth_dataset(params, years)
    out = Path(args.out)
    write_dataset(out, tables, indicators, force=args.force)
    run = Run(args, "synth")
    run.extra_config.update({k: v for k, v in asdict(params).items() if k != "year"})
    run.extra_config["years"] = years
    run.outputs = dataset_digests(out)
    run.finish()
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gvc-atlas", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def dataset_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("dataset", help="dataset directory")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--manifest", help="run manifest path")
        return sp

    sp = dataset_cmd("validate", "check balance and sign constraints")
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--config")
    sp.set_defaults(func=cmd_validate)

    sp = dataset_cmd("participation", "backward/forward participation series")
    sp.add_argument("--years", help="comma list or ranges, e.g. 2000,2005-2010")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--weighting", choices=("none", "export"))
    sp.add_argument("--config", "--thresholds", dest="thresholds")
    sp.set_defaults(func=cmd_participation)

    sp = dataset_cmd("classify", "assign taxonomy buckets")
    sp.add_argument("--year", type=int)
    sp.add_argument("--thresholds", "--config", dest="thresholds")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--require-complete", action="store_true")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_classify)

    sp = dataset_cmd("transitions", "bucket moves between two years")
    sp.add_argument("--from-year", type=int, required=True)
    sp.add_argument("--to-year", type=int, required=True)
    sp.add_argument("--thresholds", "--config", dest="thresholds")
    sp.set_defaults(func=cmd_transitions)

    sp = dataset_cmd("decompose", "single-country export decomposition")
    sp.add_argument("--year", type=int, required=True)
    sp.add_argument("--country", required=True)
    sp.add_argument("--config", "--thresholds", dest="thresholds")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("synth", help="write a seeded synthetic dataset")
    sp.add_argument("--countries", type=int, default=3)
    sp.add_argument("--sectors", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--openness", type=float, default=0.2)
    sp.add_argument("--max-col-sum", type=float, default=0.6)
    sp.add_argument("--years", default="2000,2005")
    sp.add_argument("--out", required=True, help="dataset directory")
    sp.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TableValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (UsageError, GVCError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

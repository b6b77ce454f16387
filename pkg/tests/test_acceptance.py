"""Exit criteria. Run ``pytest tests/test_acceptance.py`` for the summary table."""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from gvc_atlas.cli import main
from gvc_atlas.decompose import decompose_all, oracle_va_trace, va_origin_matrix
from gvc_atlas.ingest import SynthParams, read_dataset, synth_economy
from gvc_atlas.manifest import dataset_digests
from gvc_atlas.taxonomy import Bucket, classify, classify_panel, transitions

from conftest import worked
from taxonomy_cases import BOUNDARIES, CZECH_LIKE, INDIA_LIKE, row

SEEDS = range(1, 101)


def fixture_params(seed):
    return SynthParams(
        countries=2 + seed % 5,
        sectors_per_country=1 + (seed // 5) % 4,
        seed=seed,
        openness=0.05 * (1 + seed % 10),
    )


@pytest.fixture(scope="module")
def fixture_set():
    return [synth_economy(fixture_params(s)) for s in SEEDS]


def test_fixture_set_covers_grid(fixture_set):
    shapes = {(len(t.countries), t.size // len(t.countries)) for t in fixture_set}
    assert shapes == {(g, n) for g in range(2, 7) for n in range(1, 5)}


@pytest.mark.acceptance("Accounting identity: dva + fva = E and sum dvx = sum fva at 1e-9, < 10 s")
def test_accounting_identity(fixture_set):
    start = time.perf_counter()
    worst_country = worst_global = 0.0
    for t in fixture_set:
        ds = decompose_all(t).values()
        for d in ds:
            worst_country = max(worst_country, abs(d.dva + d.fva - d.gross_exports) / d.gross_exports)
        fva = sum(d.fva for d in ds)
        dvx = sum(d.dvx for d in ds)
        worst_global = max(worst_global, abs(dvx - fva) / fva)
    elapsed = time.perf_counter() - start
    assert worst_country < 1e-9
    assert worst_global < 1e-9
    assert elapsed < 10.0


@pytest.mark.acceptance("Oracle equivalence: va_origin_matrix vs power series K=200 within 1e-8, < 30 s")
def test_oracle_equivalence(fixture_set):
    start = time.perf_counter()
    worst = max(np.abs(va_origin_matrix(t).vax - oracle_va_trace(t, 200).vax).max() for t in fixture_set)
    elapsed = time.perf_counter() - start
    assert worst < 1e-8
    assert elapsed < 30.0


@pytest.mark.acceptance("Hand-computed 2-country fixture")
def test_hand_computed_fixture():
    d = decompose_all(worked())
    a, b = d["A"], d["B"]
    assert a.dva == pytest.approx(70.0, abs=1e-12)
    assert a.fva == pytest.approx(0.0, abs=1e-12)
    assert a.dvx == pytest.approx(16.667, abs=1e-3)
    assert a.backward_share == pytest.approx(0.0, abs=1e-12)
    assert a.forward_share == pytest.approx(0.2381, abs=1e-4)
    assert b.dva == pytest.approx(23.333, abs=1e-3)
    assert b.fva == pytest.approx(16.667, abs=1e-3)
    assert b.backward_share == pytest.approx(0.41667, abs=1e-5)


@pytest.mark.acceptance("Threshold faithfulness: 14 boundary rows (value and value - 1e-9)")
def test_threshold_faithfulness():
    checked = 0
    for name, size, at, below, bucket_at, bucket_below in BOUNDARIES:
        got_at = classify(row(size=size, **at), size).bucket
        got_below = classify(row(size=size, **below), size).bucket
        assert got_at is bucket_at, f"{name}: at threshold got {got_at}"
        assert got_below is bucket_below, f"{name}: below threshold got {got_below}"
        checked += 2
    assert checked == 14
    # inclusive innovation floor for small countries, exactly at ip = 0.15, rd = 1.5
    small_at = dict(BOUNDARIES[4][2])
    assert (small_at["ip"], small_at["rd"]) == (0.15, 1.5)


@pytest.mark.acceptance("Transition reproduction: Czech-like and India-like moves")
def test_transition_reproduction():
    L, A, I = Bucket.LIMITED_MANUFACTURING, Bucket.ADVANCED_MANUF_SERVICES, Bucket.INNOVATIVE_ACTIVITIES
    (cze,) = transitions(classify_panel(CZECH_LIKE))
    assert [(m.from_bucket, m.to_bucket) for m in cze.moves] == [(L, A), (A, I)]
    assert cze.moves[1].to_year > 2010
    (ind,) = transitions(classify_panel(INDIA_LIKE))
    assert [(m.from_bucket, m.to_bucket) for m in ind.moves] == [(L, A)]


def _pipeline(root: Path) -> dict:
    root.mkdir()
    ds = root / "ds"
    outputs = {}
    calls = [
        ("synth", ["synth", "--seed", "42", "--countries", "4", "--sectors", "3", "--out", str(ds)], None),
        ("validate", ["validate", str(ds), "--strict", "--out", str(root / "validate.txt")], root / "validate.txt"),
        ("participation", ["participation", str(ds), "--weighting", "export", "--out", str(root / "series.csv")], root / "series.csv"),
        ("classify", ["classify", str(ds), "--trace", "--out", str(root / "classes.csv")], root / "classes.csv"),
        ("transitions", ["transitions", str(ds), "--from-year", "2000", "--to-year", "2005", "--out", str(root / "moves.json")], root / "moves.json"),
    ]
    for name, argv, out in calls:
        assert main(argv) == 0, name
        manifest = Path(str(out if out else ds) + ".manifest.json")
        outputs[f"{name}.digest"] = json.loads(manifest.read_text())["digest"]
        if out:
            outputs[name] = out.read_bytes()
    outputs["buckets"] = (root / "series_buckets.csv").read_bytes()
    outputs["dataset"] = dataset_digests(ds)
    return outputs


@pytest.mark.acceptance("Determinism: two seed-42 pipeline runs are byte-identical")
def test_determinism(tmp_path):
    first = _pipeline(tmp_path / "run1")
    second = _pipeline(tmp_path / "run2")
    assert first.keys() == second.keys()
    for key in first:
        assert first[key] == second[key], key
    assert read_dataset(tmp_path / "run1" / "ds", strict=True).years == [2000, 2005]


EORA_DIR = os.environ.get("GVC_ATLAS_EORA_DIR")


@pytest.mark.eora
@pytest.mark.acceptance("EORA26 reproduction (optional, needs licensed data): India 2015 backward in [0.14, 0.18]")
@pytest.mark.skipif(not EORA_DIR, reason="set GVC_ATLAS_EORA_DIR to an EORA26 dataset converted to the gvc_atlas layout")
def test_india_backward_share_eora():
    country = os.environ.get("GVC_ATLAS_EORA_INDIA", "IND")
    ds = read_dataset(EORA_DIR)
    d = decompose_all(ds.tables[2015])[country]
    assert 0.14 <= d.backward_share <= 0.18

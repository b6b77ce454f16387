"""
Writing a dataset and driving the command line
==============================================

Tables and indicators round-trip through plain CSV files. The same steps
are available from the shell as ``gvc-atlas synth / validate /
participation / classify / transitions``.
"""

import tempfile
from pathlib import Path

from gvc_atlas import SynthParams, read_dataset
from gvc_atlas.cli import main
from gvc_atlas.ingest import synth_dataset, write_dataset

work = Path(tempfile.mkdtemp())
tables, indicators = synth_dataset(SynthParams(countries=3, sectors_per_country=2, seed=42), [2000, 2005])
root = write_dataset(work / "ds", tables, indicators)
print(sorted(p.relative_to(root).as_posix() for p in root.rglob("*.csv")))

ds = read_dataset(root, strict=True)
print("years:", ds.years)

main(["participation", str(root), "--manifest", str(work / "participation.manifest.json")])
main(["classify", str(root), "--year", "2005", "--manifest", str(work / "classify.manifest.json")])

"""The same pipeline through the ``iceberg`` command, writing reports to a temp directory."""

import json
import tempfile
from pathlib import Path

from iceberg.cli import main

work = Path(tempfile.mkdtemp())
data = work / "data"
main(["synth", "--seed", "42", "--output", str(data)])
for cmd in ("compute", "hhi", "validate", "plotdata"):
    main([cmd, "--data", str(data), "--output", str(work / "out")])

report = json.loads((work / "out" / "exposure_report.json").read_text())
print("inputs:", {k: v["sha256"][:12] for k, v in report["metadata"]["inputs"].items()})
for r in report["surprise"]:
    if r["level"] != "county":
        print(f"{r['region']:3s} surface {r['surface_index']:.4f} "
              f"iceberg {r['iceberg_index']:.4f} gap {r['gap']:.4f}")
print((work / "out" / "tiers.csv").read_text())

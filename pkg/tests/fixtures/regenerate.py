"""Recompute the frozen trend fixtures.

Run from the repository root:  python3 tests/fixtures/regenerate.py
The acceptance tests compare fresh runs against these files, so only
regenerate after a deliberate change to the generators or the algorithms.
"""

from __future__ import annotations

import json
from pathlib import Path

from qrcorners.experiments import box_control_scan, tv_scan
from qrcorners.subsets import parse_subset_spec

HERE = Path(__file__).parent
FAMILY = ["sl2:5", "sl2:7", "sl2:13"]
SEED = 0


def tv_fixture() -> dict:
    rows = tv_scan(FAMILY, 2, parse_subset_spec("random:0.25"), "mean/2", seed=SEED)
    contrast = tv_scan(["cyclic:336"], 2, parse_subset_spec("interval", delta=0.25), "mean/2", seed=SEED)
    return {"seed": SEED, "rows": [r.row() for r in rows], "contrast": [r.row() for r in contrast]}


def box_fixture() -> dict:
    return {"seed": SEED, "rows": box_control_scan(FAMILY, 2, seed=SEED)}


def main() -> None:
    for name, fn in [("tv_scan_sl2.json", tv_fixture), ("box_control_sl2.json", box_fixture)]:
        (HERE / name).write_text(json.dumps(fn(), sort_keys=True, indent=2) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()

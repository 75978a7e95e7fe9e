#!/usr/bin/env python3
"""Regenerate the checked-in synthetic corpus fixture.

Run from the repository root:

    python3 tools/make_fixtures.py
"""

from pathlib import Path

from sevkit.corpus import write_records
from sevkit.samples import generate_raw_records

FIXTURE_SEED = 1207
FIXTURE_COUNT = 360

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "fixtures" / "raw_methods.jsonl"
    out.parent.mkdir(exist_ok=True)
    records = generate_raw_records(FIXTURE_COUNT, FIXTURE_SEED)
    write_records(records, out)
    print(f"wrote {len(records)} records to {out}")

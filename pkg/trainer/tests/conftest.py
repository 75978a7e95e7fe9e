"""Shared fixtures: fusion exports produced by the metric toolkit's CLI.

The trainer only ever sees the toolkit through its file interfaces, so the
fixtures shell out to the installed `sevkit` executable rather than
importing it.
"""

from __future__ import annotations

import shutil
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
FIXTURE_CORPUS = REPO_ROOT / "fixtures" / "raw_methods.jsonl"


def run_sevkit(*args: str) -> None:
    executable = shutil.which("sevkit")
    command = [executable] if executable else [sys.executable, "-m", "sevkit.cli"]
    subprocess.run([*command, *args], check=True, capture_output=True, text=True)


def build_exports(root: Path, raw: Path, seed: int) -> Path:
    corpus = root / "corpus.jsonl"
    splits = root / "splits"
    exports = root / "exports"
    exports.mkdir()
    run_sevkit("corpus", "build", "--in", str(raw), "--out", str(corpus))
    run_sevkit("corpus", "split", "--in", str(corpus), "--seed", str(seed),
               "--out-dir", str(splits))
    for mode in ("plain", "inline", "cls"):
        for split in ("train", "valid", "test"):
            run_sevkit("fusion", "export", "--mode", mode, "--split", split,
                       "--splits-dir", str(splits),
                       "--out", str(exports / f"{mode}_{split}.jsonl"))
    return exports


@pytest.fixture(scope="session")
def smoke_exports(tmp_path_factory) -> Path:
    """Fusion exports for a 50-record smoke corpus."""
    root = tmp_path_factory.mktemp("smoke")
    raw = root / "raw.jsonl"
    run_sevkit("corpus", "demo", "--out", str(raw), "--count", "50", "--seed", "5")
    return build_exports(root, raw, seed=5)


@pytest.fixture(scope="session")
def smoke_splits(smoke_exports) -> Path:
    return smoke_exports.parent / "splits"


@pytest.fixture(scope="session")
def fixture_exports(tmp_path_factory) -> Path:
    """Fusion exports for the checked-in 360-method fixture corpus."""
    root = tmp_path_factory.mktemp("fixture")
    return build_exports(root, FIXTURE_CORPUS, seed=11)

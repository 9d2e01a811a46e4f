"""Shared paths for the demo scripts."""

import shutil
import tempfile
from pathlib import Path

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "corpus"


def scratch():
    """A throw-away working directory holding a copy of the small corpus."""
    work = Path(tempfile.mkdtemp(prefix="smtquery-demo-"))
    shutil.copytree(CORPUS, work / "smtfiles")
    return work

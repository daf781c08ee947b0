"""Rewrite tests/golden/*.out from the CLI cases in tests/golden/manifest.json.

Run from the repository root after an intentional change to CLI output.
"""

import contextlib
import io
import json
from pathlib import Path

from qpolar.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"


def run(args: list[str]) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


if __name__ == "__main__":
    import os

    os.chdir(ROOT)
    cases = json.loads((GOLDEN / "manifest.json").read_text())
    for case in cases:
        code, out = run(case["args"])
        (GOLDEN / f"{case['name']}.out").write_text(f"exit {code}\n" + out)
        print(f"{case['name']}: exit {code}")

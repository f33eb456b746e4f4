"""CSV emission and suite bookkeeping.

All CSVs are UTF-8 with a header row, LF line endings and '.' decimal
separators; identical configs and seeds produce byte-identical files.
Runtimes are kept out of the CSVs for that reason.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    constants: dict = field(default_factory=dict)
    runtime: float = 0.0
    artifacts: list = field(default_factory=list)
    witness: str = ""


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def write_csv(path: str, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(x) for x in row) + "\n")
    return path


def write_summary(out_dir: str, results) -> str:
    rows = []
    for r in results:
        consts = ";".join(f"{k}={fmt(v)}" for k, v in sorted(r.constants.items()))
        rows.append((r.suite, fmt(r.passed), consts, r.witness))
    return write_csv(os.path.join(out_dir, "summary.csv"),
                     ["suite", "passed", "constants", "witness"], rows)

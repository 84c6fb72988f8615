"""Report assembly and JSON/CSV serialization of check tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from uhardy.montecarlo import CheckResult

COLUMNS = [
    "name",
    "expected",
    "expected_provenance",
    "mean_re",
    "mean_im",
    "stderr",
    "sigma_distance",
    "n_samples",
    "level",
    "seed",
    "pass",
    "asserted",
]


def jsonable(obj: Any) -> Any:
    """Complex numbers become ``[re, im]``; numpy scalars become Python scalars."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@dataclass
class Report:
    """Header (run metadata) plus a deterministic body of checks and diagnostics."""

    header: dict
    checks: list[CheckResult] = field(default_factory=list)
    diagnostics: dict[str, list] = field(default_factory=dict)

    def extend(self, checks: list[CheckResult], diagnostics: dict[str, list] | None = None):
        self.checks.extend(checks)
        for name, rows in (diagnostics or {}).items():
            self.diagnostics.setdefault(name, []).extend(rows)

    @property
    def asserted_failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.asserted and not c.passed]

    @property
    def ok(self) -> bool:
        return not self.asserted_failures

    def body(self) -> dict:
        return {
            "checks": [c.to_row() for c in self.checks],
            "diagnostics": jsonable(self.diagnostics),
        }

    def body_json(self) -> str:
        return json.dumps(self.body(), indent=1)

    def to_json(self) -> str:
        return json.dumps({"header": jsonable(self.header), "body": self.body()}, indent=1)

    def to_csv(self) -> str:
        """Check table only; header fields as leading ``#`` comment lines."""
        buf = io.StringIO()
        for k, v in self.header.items():
            buf.write(f"# {k}: {json.dumps(jsonable(v))}\n")
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for c in self.checks:
            row = c.to_row()
            row["expected"] = f"{row['expected'][0]!r},{row['expected'][1]!r}"
            writer.writerow(row)
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()

    def sigma_histogram(self, edges=(0, 1, 2, 3, 4, math.inf)) -> dict[str, int]:
        """Counts of sampled, asserted rows by sigma distance."""
        hist = {f"[{a},{b})": 0 for a, b in zip(edges, edges[1:])}
        for c in self.checks:
            if c.abs_tol is not None or not c.asserted:
                continue
            s = c.sigma_distance
            for a, b in zip(edges, edges[1:]):
                if a <= s < b:
                    hist[f"[{a},{b})"] += 1
                    break
        return hist

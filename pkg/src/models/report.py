# src/models/report.py

"""
Experiment report model: named scalars and series with provenance, plus the
bound checks that decide a run's outcome.
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

from src.errors import BadParam


@dataclass(frozen=True)
class BoundCheck:
    """``value`` compared against ``bound`` with relation 'ge' or 'le' and slack ``tol``.

    Inconclusive checks are reported but never fail a run.
    """

    name: str
    value: float
    bound: float
    relation: str = "ge"
    tol: float = 0.0
    conclusive: bool = True

    @property
    def passed(self) -> bool:
        if not self.conclusive:
            return True
        if self.relation == "ge":
            return self.value >= self.bound - self.tol
        if self.relation == "le":
            return self.value <= self.bound + self.tol
        raise BadParam(f"Unknown relation '{self.relation}'")

    def describe(self) -> str:
        symbol = ">=" if self.relation == "ge" else "<="
        return f"{self.name}: {self.value:.6g} {symbol} {self.bound:.6g} (tol {self.tol:g})"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "relation": self.relation,
            "tol": self.tol,
            "conclusive": self.conclusive,
            "passed": self.passed,
        }


@dataclass
class ExperimentReport:
    name: str
    params: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)
    seed: int | None = None
    meta: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add_scalar(self, name: str, value: float):
        value = float(value)
        if not math.isfinite(value):
            raise BadParam(f"Scalar '{name}' is not finite: {value}")
        self.scalars[name] = value

    def add_series(self, name: str, values):
        values = [float(v) for v in values]
        if not all(math.isfinite(v) for v in values):
            raise BadParam(f"Series '{name}' has non-finite entries")
        self.series[name] = values

    def check(self, name: str, value: float, bound: float, relation: str = "ge", tol: float = 0.0, conclusive: bool = True) -> BoundCheck:
        entry = BoundCheck(name, float(value), float(bound), relation, float(tol), conclusive)
        self.checks.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def violations(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.passed]

    def params_hash(self) -> str:
        payload = json.dumps({"name": self.name, "params": self.params, "seed": self.seed}, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    @property
    def stem(self) -> str:
        return f"{self.name}_{self.params_hash()}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "seed": self.seed,
            "provenance": list(self.provenance),
            "meta": self.meta,
            "scalars": self.scalars,
            "series": self.series,
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, default=str)

    def to_csv_text(self) -> str:
        """One column per series, shorter series padded with empty cells."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        names = sorted(self.series)
        writer.writerow(["index"] + names)
        length = max((len(self.series[n]) for n in names), default=0)
        for i in range(length):
            row = [i]
            for n in names:
                values = self.series[n]
                row.append(repr(values[i]) if i < len(values) else "")
            writer.writerow(row)
        return buffer.getvalue()

"""Experiment reports: result rows, CSV/JSON output and plot data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

COLUMNS = ("experiment", "model", "alpha", "n", "statistic", "value", "stderr", "criterion", "passed")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "pass" if v else "fail"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".12g")
    return str(v)


@dataclass
class Row:
    experiment: str
    model: str
    alpha: float
    n: int | None
    statistic: str
    value: float
    stderr: float = float("nan")
    criterion: str | None = None
    passed: bool | None = None


@dataclass
class Report:
    experiment: str
    rows: list[Row] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    plotdata: dict[str, list[dict]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    inconclusive: bool = False

    def add(self, **kw) -> Row:
        row = Row(experiment=self.experiment, **kw)
        if row.criterion is not None and any(r.criterion == row.criterion for r in self.rows):
            raise ValueError(f"criterion {row.criterion} already reported")
        self.rows.append(row)
        return row

    def criteria(self) -> dict[str, bool | None]:
        return {r.criterion: r.passed for r in self.rows if r.criterion is not None}

    @property
    def all_passed(self) -> bool:
        crit = self.criteria()
        return bool(crit) and all(v is True for v in crit.values())

    def exit_code(self) -> int:
        if self.inconclusive or any(v is None for v in self.criteria().values()):
            return 2
        return 0 if self.all_passed else 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "experiment": self.experiment,
                "metadata": self.metadata,
                "inconclusive": self.inconclusive,
                "notes": self.notes,
                "rows": [asdict(r) for r in self.rows],
            },
            indent=2,
            default=str,
        )

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        (out / "plotdata").mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(self.to_csv())
        (out / "report.json").write_text(self.to_json())
        for name, rows in self.plotdata.items():
            if not rows:
                continue
            cols = list(rows[0])
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow([_fmt(r[c]) for c in cols])
            (out / "plotdata" / f"{name}.csv").write_text(buf.getvalue())
        return out

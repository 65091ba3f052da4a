# parallel-cfs/tools/reports.py

from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field, field_validator

BENCH_COLUMNS = ["engine", "workers", "partitions", "fraction", "median_ms", "speedup"]


class RunReport(BaseModel):
    selected: List[str]
    indices: List[int]
    merit: float
    search_merit: float
    pairs_computed: int = Field(ge=0)
    timings_ms: Dict[str, float] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    execution: Optional[Dict[str, Any]] = None

    @field_validator("timings_ms")
    @classmethod
    def _non_negative(cls, v):
        if any(t < 0 for t in v.values()):
            raise ValueError("timings must be non-negative")
        return v

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True)

    def to_text(self) -> str:
        lines = [
            f"selected ({len(self.indices)}): " + (", ".join(self.selected) or "-"),
            f"indices: {self.indices}",
            f"merit: {self.merit:.6f} (search {self.search_merit:.6f})",
            f"pairs computed: {self.pairs_computed}",
        ]
        for phase, ms in self.timings_ms.items():
            lines.append(f"{phase}: {ms:.1f} ms")
        return "\n".join(lines)


class BenchRow(BaseModel):
    engine: str
    workers: int = Field(ge=1)
    partitions: int = Field(ge=1)
    fraction: float = Field(gt=0)
    median_ms: float = Field(ge=0)
    speedup: float = Field(gt=0)


class BenchReport(BaseModel):
    digest: str
    rows: List[BenchRow] = Field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.rows], columns=BENCH_COLUMNS)

    def to_csv(self, path: Optional[Path] = None) -> str:
        text = self.to_frame().to_csv(index=False, float_format="%.4f", lineterminator="\n")
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

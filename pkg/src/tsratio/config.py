"""Run configuration: a flat ``key = value`` file plus command-line overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from datetime import date
from pathlib import Path

DEFAULT_WINDOW = (date(2009, 1, 1), date(2013, 12, 31))
DEFAULT_CENSUS = date(2015, 5, 31)

_PATH_KEYS = {"data_dir", "baselines_path", "credit_config_path", "output_dir"}
_ALIASES = {
    "data": "data_dir",
    "baselines": "baselines_path",
    "credit_config": "credit_config_path",
    "out": "output_dir",
}


def parse_window(text: str) -> tuple[date, date]:
    for sep in ("..", ",", ":"):
        if sep in text:
            a, b = text.split(sep, 1)
            return date.fromisoformat(a.strip()), date.fromisoformat(b.strip())
    raise ValueError(f"window must look like 2009-01-01..2013-12-31, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path | None = None
    window: tuple[date, date] = DEFAULT_WINDOW
    census_date: date = DEFAULT_CENSUS
    top_percentile: float = 90.0
    min_staff_uda: int = 10
    min_staff_sds: int = 3
    baselines_path: Path | None = None
    merge_baselines: bool = False
    credit_config_path: Path | None = None
    output_dir: Path = field(default_factory=lambda: Path("out"))

    def __post_init__(self):
        start, end = self.window
        if not start < end:
            raise ValueError(f"window start {start} must precede end {end}")
        if self.census_date < end:
            raise ValueError(f"census date {self.census_date} precedes window end {end}")
        if not 0 < self.top_percentile < 100:
            raise ValueError("top percentile must lie strictly between 0 and 100")
        if self.min_staff_uda < 1 or self.min_staff_sds < 1:
            raise ValueError("staff minimums must be positive")

    def min_staff(self, scope_kind: str) -> int:
        return self.min_staff_sds if scope_kind == "SDS" else self.min_staff_uda

    def with_overrides(self, **values) -> "RunConfig":
        return replace(self, **_coerce({k: v for k, v in values.items() if v is not None}))


def _coerce(raw: dict, base: Path | None = None) -> dict:
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in raw.items():
        key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = value.strip().strip('"').strip("'")
            if key == "window":
                value = parse_window(value)
            elif key == "census_date":
                value = date.fromisoformat(value)
            elif key == "top_percentile":
                value = float(value)
            elif key in ("min_staff_uda", "min_staff_sds"):
                value = int(value)
            elif key == "merge_baselines":
                value = value.lower() in ("1", "true", "yes", "on")
        if key in _PATH_KEYS and value is not None:
            value = Path(value)
            if base is not None and not value.is_absolute():
                value = base / value
        out[key] = value
    return out


def load_config(path) -> RunConfig:
    """Read ``key = value`` lines (``#`` comments); relative paths resolve against the file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + text, source=str(path))
    return RunConfig(**_coerce(dict(parser["run"]), base=path.parent))

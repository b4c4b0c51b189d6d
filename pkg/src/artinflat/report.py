"""Line-oriented reports: a ``[kind]`` header, then ``key = value`` lines in a fixed order.

Reports are separated by blank lines.  Values are plain strings; booleans
print as ``true``/``false`` and missing values as ``none``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, np.ndarray):
        return "[" + ", ".join(str(int(x)) for x in v) + "]"
    return str(v)


@dataclass
class Report:
    kind: str
    items: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value) -> Report:
        if any(k == key for k, _ in self.items):
            raise KeyError(f"duplicate report key {key!r}")
        self.items.append((key, format_value(value)))
        return self

    def extend(self, pairs: Iterable[tuple[str, object]]) -> Report:
        for k, v in pairs:
            self.add(k, v)
        return self

    def __getitem__(self, key: str) -> str:
        for k, v in self.items:
            if k == key:
                return v
        raise KeyError(key)

    def get(self, key: str, default=None):
        try:
            return self[key]
        except KeyError:
            return default

    def keys(self) -> list[str]:
        return [k for k, _ in self.items]

    def to_text(self) -> str:
        return "\n".join([f"[{self.kind}]"] + [f"{k} = {v}" for k, v in self.items]) + "\n"


def render(reports: Iterable[Report]) -> str:
    return "\n".join(r.to_text() for r in reports)


def parse_reports(text: str) -> list[Report]:
    out: list[Report] = []
    cur: Report | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]") and " = " not in line:
            cur = Report(line[1:-1])
            out.append(cur)
            continue
        key, sep, val = line.partition(" = ")
        if not sep or cur is None:
            raise ValueError(f"line {lineno}: expected 'key = value' inside a report")
        cur.items.append((key, val))
    return out


def as_bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise ValueError(f"not a boolean: {s!r}")
    return s == "true"

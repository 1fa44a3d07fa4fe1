"""Simulation traces.

Every engine transition of interest appends one TraceEvent.  The CSV
format is the stable interchange surface: columns
`time,event,object,pid,method,data`, where data is `;`-separated
`key=value` pairs.  Values inside data escape `\\`, `;` and `=` with a
backslash so round-trips are exact.  Times and rationals serialize as
`p/q` in lowest terms (bare integer when the denominator is 1).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import RtabsError
from .values import format_rat, parse_rat

CSV_HEADER = ["time", "event", "object", "pid", "method", "data"]

EVENT_KINDS = {
    "invoke", "activate", "schedule", "suspend", "return", "resolve",
    "tick", "new_object", "deadline_miss", "error",
}


@dataclass(frozen=True)
class TraceEvent:
    time: Fraction
    kind: str
    obj: int | None = None
    pid: int | None = None
    method: str | None = None
    data: tuple[tuple[str, str], ...] = ()

    def get(self, key: str) -> str | None:
        for k, v in self.data:
            if k == key:
                return v
        return None


@dataclass
class Trace:
    events: list[TraceEvent] = field(default_factory=list)

    def append(self, event: TraceEvent) -> None:
        self.events.append(event)

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)


def _escape(value: str) -> str:
    return (value.replace("\\", "\\\\").replace(";", "\\;").replace("=", "\\="))


def _unescape(value: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            out.append(value[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def format_data(pairs: tuple[tuple[str, str], ...]) -> str:
    return ";".join(f"{k}={_escape(v)}" for k, v in pairs)


def parse_data(text: str) -> tuple[tuple[str, str], ...]:
    if not text:
        return ()
    pairs: list[tuple[str, str]] = []
    # split on unescaped ';'
    items: list[str] = []
    current: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            current.append(ch)
            current.append(text[i + 1])
            i += 2
            continue
        if ch == ";":
            items.append("".join(current))
            current = []
        else:
            current.append(ch)
        i += 1
    items.append("".join(current))
    for item in items:
        # split on the first unescaped '='
        j = 0
        split_at = -1
        while j < len(item):
            if item[j] == "\\":
                j += 2
                continue
            if item[j] == "=":
                split_at = j
                break
            j += 1
        if split_at < 0:
            raise RtabsError(f"malformed data field: {item!r}")
        pairs.append((item[:split_at], _unescape(item[split_at + 1:])))
    return tuple(pairs)


def _event_row(event: TraceEvent) -> list[str]:
    return [
        format_rat(event.time),
        event.kind,
        f"o{event.obj}" if event.obj is not None else "",
        f"f{event.pid}" if event.pid is not None else "",
        event.method or "",
        format_data(event.data),
    ]


def _row_event(row: list[str]) -> TraceEvent:
    if len(row) != len(CSV_HEADER):
        raise RtabsError(f"expected {len(CSV_HEADER)} columns, got {len(row)}")
    time = parse_rat(row[0])
    kind = row[1]
    if kind not in EVENT_KINDS:
        raise RtabsError(f"unknown event kind {kind!r}")
    obj = int(row[2][1:]) if row[2] else None
    pid = int(row[3][1:]) if row[3] else None
    method = row[4] or None
    data = parse_data(row[5])
    return TraceEvent(time, kind, obj, pid, method, data)


def render_csv(trace: Trace) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for event in trace.events:
        writer.writerow(_event_row(event))
    return out.getvalue()


def write_csv(trace: Trace, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(render_csv(trace))


def read_csv_text(text: str) -> Trace:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != CSV_HEADER:
        raise RtabsError("missing or malformed trace header")
    trace = Trace()
    for row in rows[1:]:
        trace.append(_row_event(row))
    return trace


def read_csv(path: str) -> Trace:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return read_csv_text(handle.read())


def render_structured(trace: Trace) -> str:
    lines = []
    for event in trace.events:
        record = {
            "time": format_rat(event.time),
            "event": event.kind,
            "object": event.obj,
            "pid": event.pid,
            "method": event.method,
            "data": {k: v for k, v in event.data},
        }
        lines.append(json.dumps(record, sort_keys=False, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


def write_structured(trace: Trace, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(render_structured(trace))


def read_structured_text(text: str) -> Trace:
    trace = Trace()
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        trace.append(TraceEvent(
            time=parse_rat(record["time"]),
            kind=record["event"],
            obj=record["object"],
            pid=record["pid"],
            method=record["method"],
            data=tuple((k, v) for k, v in record["data"].items()),
        ))
    return trace


def read_structured(path: str) -> Trace:
    with open(path, "r", encoding="utf-8") as handle:
        return read_structured_text(handle.read())

"""ASAP scheduling of physical circuits onto integer-nanosecond timelines.

Durations are flat per gate class. A routed SWAP is priced as one atomic
300 ns event (its 3-CX realization back to back); cavity I/O swaps as one
100 ns sideband pulse; measurement is a zero-duration marker pinned at the
makespan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .transpile import ONE_QUBIT_PHYS, PhysicalCircuit, PhysicalGate


@dataclass(frozen=True)
class GateTimes:
    single_qubit: int = 40
    cx: int = 100
    swap_io: int = 100
    lattice_swap: int = 300
    measure: int = 0

    def duration(self, kind: str) -> int:
        if kind in ONE_QUBIT_PHYS:
            return self.single_qubit
        if kind == "cx":
            return self.cx
        if kind in ("swap_out", "swap_in"):
            return self.swap_io
        if kind == "swap":
            return self.lattice_swap
        if kind == "measure":
            return self.measure
        raise ValueError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class ScheduledGate:
    gate: PhysicalGate
    start: int
    duration: int

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass
class Schedule:
    events: list[ScheduledGate]
    makespan: int
    depth: int

    def to_dict(self) -> dict:
        events = []
        for ev in self.events:
            g = ev.gate
            d = {"op": g.kind, "resources": list(g.resources),
                 "start": ev.start, "duration": ev.duration}
            if g.angle is not None:
                d["angle"] = g.angle
            events.append(d)
        return {"makespan": self.makespan, "depth": self.depth,
                "events": events}

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def asap_schedule(pc: PhysicalCircuit,
                  times: GateTimes | None = None) -> Schedule:
    """Greedy as-soon-as-possible schedule.

    Each gate starts at the max ready time of its resources; measures are
    deferred to the makespan. Events are reported sorted by (start,
    emission index), which keeps byte-identical output across runs.
    """
    times = times or GateTimes()
    ready: dict[int, int] = {}
    layer: dict[int, int] = {}
    events: list[tuple[int, int, PhysicalGate, int]] = []
    measures: list[PhysicalGate] = []
    depth = 0
    for idx, g in enumerate(pc.gates):
        if g.kind == "measure":
            measures.append(g)
            continue
        start = max((ready.get(r, 0) for r in g.resources), default=0)
        dur = times.duration(g.kind)
        lay = 1 + max((layer.get(r, 0) for r in g.resources), default=0)
        for r in g.resources:
            ready[r] = start + dur
            layer[r] = lay
        depth = max(depth, lay)
        events.append((start, idx, g, dur))
    makespan = max((s + d for s, _, _, d in events), default=0)
    for g in measures:
        events.append((makespan, len(pc.gates) + len(events), g,
                       times.measure))
        depth = max(depth, 1)
    events.sort(key=lambda e: (e[0], e[1]))
    scheduled = [ScheduledGate(g, s, d) for s, _, g, d in events]
    final_makespan = max((ev.end for ev in scheduled), default=0)
    return Schedule(scheduled, final_makespan, depth)


@dataclass
class IdleReport:
    """Busy and idle time per resource over [first touch, makespan]."""
    busy: dict[int, int] = field(default_factory=dict)
    idle: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"busy": {str(k): v for k, v in sorted(self.busy.items())},
                "idle": {str(k): v for k, v in sorted(self.idle.items())}}


def idle_report(schedule: Schedule) -> IdleReport:
    first: dict[int, int] = {}
    busy: dict[int, int] = {}
    for ev in schedule.events:
        for r in ev.gate.resources:
            if r not in first:
                first[r] = ev.start
            busy[r] = busy.get(r, 0) + ev.duration
    report = IdleReport()
    for r, t0 in first.items():
        report.busy[r] = busy[r]
        report.idle[r] = (schedule.makespan - t0) - busy[r]
    return report

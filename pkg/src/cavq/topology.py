"""Hardware topologies: multimode-cavity devices and 2D transmon lattices.

Resources are integer-indexed. On lattices every resource is a transmon; on
cavity devices the first ``cavities`` ids are transmons (transmon ``c``
serves cavity ``c``) followed by modes in cavity-major order, so mode ``m``
of cavity ``c`` has id ``cavities + c * modes_per_cavity + m``.

Edge kinds: ``"io"`` connects a cavity mode to a transmon (the only operation
across it is a state swap); ``"coupling"`` connects two transmons and admits
two-qubit gates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Topology:
    kind: str
    num_resources: int
    edges: list[tuple[int, int]]
    edge_kinds: dict[tuple[int, int], str]
    config: dict
    # cavity-only fields
    cavities: int = 0
    modes_per_cavity: int = 0
    shared_io: bool = False
    _adj: dict[int, list[int]] = field(default_factory=dict, repr=False)
    _dist_cache: dict[int, list[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.edges = sorted((min(a, b), max(a, b)) for a, b in self.edges)
        self._adj = {i: [] for i in range(self.num_resources)}
        for a, b in self.edges:
            self._adj[a].append(b)
            self._adj[b].append(a)
        for nbrs in self._adj.values():
            nbrs.sort()

    # -- structure ----------------------------------------------------------

    def neighbors(self, r: int) -> list[int]:
        return self._adj[r]

    def degree(self, r: int) -> int:
        return len(self._adj[r])

    def is_transmon(self, r: int) -> bool:
        if self.kind in ("honeycomb", "octagonal"):
            return True
        return r < self.cavities

    def is_mode(self, r: int) -> bool:
        return not self.is_transmon(r)

    @property
    def transmons(self) -> list[int]:
        if self.kind in ("honeycomb", "octagonal"):
            return list(range(self.num_resources))
        return list(range(self.cavities))

    @property
    def num_qubit_slots(self) -> int:
        """How many logical qubits the device can hold at rest."""
        if self.kind == "cavity":
            return self.cavities * self.modes_per_cavity
        return self.num_resources

    def mode_id(self, cavity: int, mode: int) -> int:
        if not (0 <= cavity < self.cavities and 0 <= mode < self.modes_per_cavity):
            raise ValueError(f"no mode ({cavity},{mode})")
        return self.cavities + cavity * self.modes_per_cavity + mode

    def mode_address(self, r: int) -> tuple[int, int]:
        """(cavity, mode) address of a mode resource id."""
        if not self.is_mode(r):
            raise ValueError(f"resource {r} is not a cavity mode")
        off = r - self.cavities
        return off // self.modes_per_cavity, off % self.modes_per_cavity

    def cavity_of(self, r: int) -> int:
        """Cavity a resource belongs to (transmon c serves cavity c)."""
        if self.kind != "cavity":
            raise ValueError("not a cavity topology")
        if r < self.cavities:
            return r
        return self.mode_address(r)[0]

    def transmon_of_cavity(self, cavity: int) -> int:
        if not (0 <= cavity < self.cavities):
            raise ValueError(f"no cavity {cavity}")
        return cavity

    def cavity_modes(self, cavity: int) -> list[int]:
        return [self.mode_id(cavity, m) for m in range(self.modes_per_cavity)]

    # -- metrics -------------------------------------------------------------

    def _bfs(self, src: int) -> list[int]:
        dist = self._dist_cache.get(src)
        if dist is None:
            dist = [-1] * self.num_resources
            dist[src] = 0
            frontier = [src]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self._adj[u]:
                        if dist[v] < 0:
                            dist[v] = dist[u] + 1
                            nxt.append(v)
                frontier = nxt
            self._dist_cache[src] = dist
        return dist

    def distance(self, a: int, b: int) -> int:
        """Hop count of the shortest path; raises if disconnected."""
        d = self._bfs(a)[b]
        if d < 0:
            raise ValueError(f"resources {a} and {b} are disconnected")
        return d

    def shortest_path_lex(self, a: int, b: int) -> list[int]:
        """The lexicographically smallest shortest path from a to b."""
        dist = self._bfs(b)
        if dist[a] < 0:
            raise ValueError(f"resources {a} and {b} are disconnected")
        path = [a]
        cur = a
        while cur != b:
            cur = min(v for v in self._adj[cur] if dist[v] == dist[cur] - 1)
            path.append(cur)
        return path

    # -- serialization -------------------------------------------------------

    def to_config(self) -> dict:
        return dict(self.config)

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_config(), fh, indent=2)
            fh.write("\n")


def build_cavity(cavities: int, modes_per_cavity: int, coupling: str = "line",
                 shared_io: bool = False) -> Topology:
    """Multimode-cavity device: one transmon per cavity, modes reachable only
    through I/O swaps with (by default) their own cavity's transmon."""
    if cavities < 1 or modes_per_cavity < 1:
        raise ValueError("need at least one cavity and one mode")
    if coupling not in ("line", "complete"):
        raise ValueError(f"unknown coupling {coupling!r}")
    edges: list[tuple[int, int]] = []
    kinds: dict[tuple[int, int], str] = {}
    n = cavities + cavities * modes_per_cavity
    for c in range(cavities):
        for m in range(modes_per_cavity):
            mode = cavities + c * modes_per_cavity + m
            targets = range(cavities) if shared_io else (c,)
            for t in targets:
                e = (min(t, mode), max(t, mode))
                edges.append(e)
                kinds[e] = "io"
    if coupling == "line":
        pairs = [(c, c + 1) for c in range(cavities - 1)]
    else:
        pairs = [(a, b) for a in range(cavities) for b in range(a + 1, cavities)]
    for e in pairs:
        edges.append(e)
        kinds[e] = "coupling"
    config = {"kind": "cavity", "cavities": cavities, "modes": modes_per_cavity,
              "coupling": coupling}
    if shared_io:
        config["shared_io"] = True
    return Topology(kind="cavity", num_resources=n, edges=edges,
                    edge_kinds=kinds, config=config, cavities=cavities,
                    modes_per_cavity=modes_per_cavity, shared_io=shared_io)


_HEX_CORNERS = [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)]


def build_honeycomb(rows: int, cols: int) -> Topology:
    """Brick-wall honeycomb lattice of ``rows x cols`` hexagons.

    Hexagon (i, j) is centered at (3j, 2i + j % 2); shared corners between
    neighboring hexagons are deduplicated. Vertices are numbered row-major
    over the resulting corner grid (sorted by y then x), which keeps ids
    stable and documented. Every vertex has degree 2 or 3.
    """
    if rows < 1 or cols < 1:
        raise ValueError("need at least one hexagon")
    corner_set = set()
    edge_set = set()
    for i in range(rows):
        for j in range(cols):
            cx, cy = 3 * j, 2 * i + (j % 2)
            pts = [(cx + dx, cy + dy) for dx, dy in _HEX_CORNERS]
            corner_set.update(pts)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                edge_set.add((min(a, b), max(a, b)))
    order = sorted(corner_set, key=lambda p: (p[1], p[0]))
    index = {p: k for k, p in enumerate(order)}
    edges = [(index[a], index[b]) for a, b in edge_set]
    kinds = {(min(a, b), max(a, b)): "coupling" for a, b in edges}
    config = {"kind": "honeycomb", "rows": rows, "cols": cols}
    return Topology(kind="honeycomb", num_resources=len(order), edges=edges,
                    edge_kinds=kinds, config=config)


def build_octagonal(nx: int, ny: int) -> Topology:
    """Octagonal-ring lattice (Aspen style): an ``nx x ny`` grid of 8-qubit
    rings, adjacent rings joined by two parallel bridges.

    Ring (ix, iy) occupies ids 8*(iy*nx + ix) .. +7, positions numbered
    clockwise. Bridges: east side of a ring uses positions 1 and 2 (to the
    neighbor's 6 and 5), south side uses 3 and 4 (to the neighbor's 0 and 7),
    keeping every vertex at degree <= 3.
    """
    if nx < 1 or ny < 1:
        raise ValueError("need at least one ring")
    edges: list[tuple[int, int]] = []

    def base(ix: int, iy: int) -> int:
        return 8 * (iy * nx + ix)

    for iy in range(ny):
        for ix in range(nx):
            b = base(ix, iy)
            edges += [(b + p, b + (p + 1) % 8) for p in range(8)]
            if ix + 1 < nx:
                e = base(ix + 1, iy)
                edges += [(b + 1, e + 6), (b + 2, e + 5)]
            if iy + 1 < ny:
                s = base(ix, iy + 1)
                edges += [(b + 3, s + 0), (b + 4, s + 7)]
    kinds = {(min(a, b), max(a, b)): "coupling" for a, b in edges}
    config = {"kind": "octagonal", "nx": nx, "ny": ny}
    return Topology(kind="octagonal", num_resources=8 * nx * ny, edges=edges,
                    edge_kinds=kinds, config=config)


def from_config(config: dict) -> Topology:
    kind = config.get("kind")
    if kind == "cavity":
        return build_cavity(int(config["cavities"]), int(config["modes"]),
                            coupling=config.get("coupling", "line"),
                            shared_io=bool(config.get("shared_io", False)))
    if kind == "honeycomb":
        return build_honeycomb(int(config["rows"]), int(config["cols"]))
    if kind == "octagonal":
        return build_octagonal(int(config["nx"]), int(config["ny"]))
    raise ValueError(f"unknown topology kind {kind!r}")


def from_json(path: str) -> Topology:
    with open(path) as fh:
        return from_config(json.load(fh))


def honeycomb_for(num_qubits: int) -> Topology:
    """Smallest honeycomb (grown square-ish) with at least num_qubits sites."""
    rows = cols = 1
    while True:
        topo = build_honeycomb(rows, cols)
        if topo.num_resources >= num_qubits:
            return topo
        if cols <= rows:
            cols += 1
        else:
            rows += 1


def octagonal_for(num_qubits: int) -> Topology:
    rings = (num_qubits + 7) // 8
    nx = rings
    ny = 1
    return build_octagonal(nx, ny)


def cavity_for(num_qubits: int, cavities: int = 2,
               coupling: str = "line") -> Topology:
    """Dual-cavity (by default) device sized to hold num_qubits modes."""
    modes = (num_qubits + cavities - 1) // cavities
    return build_cavity(cavities, modes, coupling=coupling)

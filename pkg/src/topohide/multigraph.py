"""Labeled undirected multigraphs with counter-distinguished loops.

Graphs are immutable: ``augment`` and friends return new values, so a
signed graph can never drift away from its signature.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from collections import deque
from dataclasses import InitVar, dataclass, field
from pathlib import Path as FsPath
from typing import Callable, Iterable, Iterator, Mapping

from .errors import InputError, MalformedError, StructureError


def _labels(labels: Iterable[str]) -> tuple[str, ...]:
    out = tuple(sorted(set(labels)))
    for lab in out:
        if not isinstance(lab, str):
            raise InputError(f"label must be a string, got {lab!r}")
    return out


@dataclass(frozen=True, order=True)
class Vertex:
    id: str
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InputError("vertex id must be a non-empty string")
        object.__setattr__(self, "labels", _labels(self.labels))

    @property
    def key(self) -> tuple:
        return ("V", self.id)


@dataclass(frozen=True)
class Edge:
    """An edge instance. Loops (u == v) carry a counter, other edges never do."""

    u: str
    v: str
    labels: tuple[str, ...] = ()
    counter: int | None = None

    def __post_init__(self):
        u, v = self.u, self.v
        if not isinstance(u, str) or not isinstance(v, str) or not u or not v:
            raise InputError("edge endpoints must be non-empty strings")
        if u > v:
            object.__setattr__(self, "u", v)
            object.__setattr__(self, "v", u)
        object.__setattr__(self, "labels", _labels(self.labels))
        if self.counter is not None:
            if self.u != self.v:
                raise InputError(f"counter on non-loop edge ({self.u}, {self.v})")
            if isinstance(self.counter, bool) or not isinstance(self.counter, int) or self.counter < 1:
                raise InputError("loop counter must be an integer >= 1")
        elif self.u == self.v:
            raise InputError(f"loop at {self.u} needs a counter")

    @property
    def is_loop(self) -> bool:
        return self.counter is not None

    @property
    def key(self) -> tuple:
        return ("E", self.u, self.v, self.counter or 0)

    def sort_key(self) -> tuple:
        return (self.u, self.v, self.counter or 0)

    def other(self, x: str) -> str:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise InputError(f"{x} is not an endpoint of ({self.u}, {self.v})")


@dataclass(frozen=True)
class Multigraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()
    boundary: frozenset[str] = frozenset()
    _adj: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        verts = tuple(sorted(self.vertices, key=lambda x: x.id))
        ids = [x.id for x in verts]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate vertex id")
        idset = set(ids)
        edges = tuple(sorted(self.edges, key=Edge.sort_key))
        seen: set[tuple] = set()
        loops: dict[str, list[int]] = {}
        for e in edges:
            for end in (e.u, e.v):
                if end not in idset:
                    raise InputError(f"edge ({e.u}, {e.v}) uses undeclared vertex {end!r}")
            if e.key in seen:
                what = f"loop counter {e.counter} at {e.u}" if e.is_loop else f"edge ({e.u}, {e.v})"
                raise InputError(f"duplicate {what}")
            seen.add(e.key)
            if e.is_loop:
                loops.setdefault(e.u, []).append(e.counter)
        for v, cs in loops.items():
            if sorted(cs) != list(range(1, len(cs) + 1)):
                raise InputError(f"loop counters at {v} must be exactly 1..{len(cs)}")
        boundary = frozenset(self.boundary)
        for b in boundary:
            if b not in idset:
                raise InputError(f"boundary node {b!r} is not a vertex")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "boundary", boundary)
        adj: dict[str, list[tuple[str, Edge]]] = {i: [] for i in ids}
        for e in edges:
            if not e.is_loop:
                adj[e.u].append((e.v, e))
                adj[e.v].append((e.u, e))
        object.__setattr__(self, "_adj", adj)

    # sizes

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise InputError(f"unknown vertex {vid!r}")

    def has_vertex(self, vid: str) -> bool:
        return vid in self._adj

    def loops_at(self, vid: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.is_loop and e.u == vid)

    def find_edge(self, u: str, v: str) -> Edge | None:
        a, b = min(u, v), max(u, v)
        for e in self.edges:
            if e.u == a and e.v == b and not e.is_loop:
                return e
        return None

    def neighbors(self, vid: str) -> list[tuple[str, Edge]]:
        if vid not in self._adj:
            raise InputError(f"unknown vertex {vid!r}")
        return self._adj[vid]

    def elements(self) -> Iterator[Vertex | Edge]:
        """Every committed element in canonical order: vertices then edges."""
        yield from self.vertices
        yield from self.edges

    # derived graphs

    def with_vertex(self, vertex: Vertex) -> Multigraph:
        return Multigraph(self.vertices + (vertex,), self.edges, self.boundary)

    def with_edge(self, edge: Edge) -> Multigraph:
        return Multigraph(self.vertices, self.edges + (edge,), self.boundary)

    # serialization

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v.id, "labels": list(v.labels)} for v in self.vertices],
            "edges": [{"u": e.u, "v": e.v, "labels": list(e.labels)} for e in self.edges if not e.is_loop],
            "loops": [{"v": e.u, "labels": list(e.labels), "counter": e.counter} for e in self.edges if e.is_loop],
            "boundary": sorted(self.boundary),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()

    def digest(self) -> bytes:
        return hashlib.sha256(b"topohide-graph\x00" + self.canonical_bytes()).digest()


# JSON schema checking with path context

def _expect(cond: bool, where: str, msg: str, errors: list[str]) -> bool:
    if not cond:
        errors.append(f"{where}: {msg}")
    return cond


def _check_labels(obj: Mapping, where: str, errors: list[str]) -> list[str]:
    labels = obj.get("labels", [])
    if not _expect(isinstance(labels, list), f"{where}.labels", "must be a list", errors):
        return []
    ok = []
    for k, lab in enumerate(labels):
        if _expect(isinstance(lab, str), f"{where}.labels[{k}]", "must be a string", errors):
            ok.append(lab)
    return ok


def graph_from_dict(doc) -> Multigraph:
    """Build a graph from its JSON document, reporting every schema violation."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise MalformedError("graph document must be a JSON object")
    known = {"vertices", "edges", "loops", "boundary"}
    for k in doc:
        _expect(k in known, k, "unknown field", errors)
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    raw_v = doc.get("vertices")
    if _expect(isinstance(raw_v, list), "vertices", "required list", errors):
        for i, obj in enumerate(raw_v):
            where = f"vertices[{i}]"
            if not _expect(isinstance(obj, dict), where, "must be an object", errors):
                continue
            vid = obj.get("id")
            labels = _check_labels(obj, where, errors)
            if _expect(isinstance(vid, str) and vid != "", f"{where}.id", "required non-empty string", errors):
                vertices.append(Vertex(vid, tuple(labels)))
    for i, obj in enumerate(doc.get("edges", []) if isinstance(doc.get("edges", []), list) else []):
        where = f"edges[{i}]"
        if not _expect(isinstance(obj, dict), where, "must be an object", errors):
            continue
        u, v = obj.get("u"), obj.get("v")
        labels = _check_labels(obj, where, errors)
        ok = _expect(isinstance(u, str) and u != "", f"{where}.u", "required non-empty string", errors)
        ok &= _expect(isinstance(v, str) and v != "", f"{where}.v", "required non-empty string", errors)
        if ok and _expect(u != v, where, "self-loops belong in 'loops' with a counter", errors):
            edges.append(Edge(u, v, tuple(labels)))
    _expect(isinstance(doc.get("edges", []), list), "edges", "must be a list", errors)
    for i, obj in enumerate(doc.get("loops", []) if isinstance(doc.get("loops", []), list) else []):
        where = f"loops[{i}]"
        if not _expect(isinstance(obj, dict), where, "must be an object", errors):
            continue
        v, c = obj.get("v"), obj.get("counter")
        labels = _check_labels(obj, where, errors)
        ok = _expect(isinstance(v, str) and v != "", f"{where}.v", "required non-empty string", errors)
        ok &= _expect(isinstance(c, int) and not isinstance(c, bool) and c >= 1,
                      f"{where}.counter", "required integer >= 1", errors)
        if ok:
            edges.append(Edge(v, v, tuple(labels), c))
    _expect(isinstance(doc.get("loops", []), list), "loops", "must be a list", errors)
    boundary = doc.get("boundary", [])
    if _expect(isinstance(boundary, list), "boundary", "must be a list", errors):
        for i, b in enumerate(boundary):
            _expect(isinstance(b, str), f"boundary[{i}]", "must be a string", errors)
        boundary = [b for b in boundary if isinstance(b, str)]
    else:
        boundary = []
    if errors:
        raise MalformedError("invalid graph document:\n  " + "\n  ".join(errors))
    try:
        return Multigraph(tuple(vertices), tuple(edges), frozenset(boundary))
    except InputError as exc:
        raise MalformedError(f"invalid graph document: {exc}") from None


def load_graph(path: str | FsPath) -> Multigraph:
    text = FsPath(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_dict(doc)


def save_graph(g: Multigraph, path: str | FsPath) -> None:
    FsPath(path).write_text(g.to_json())


# paths


@dataclass(frozen=True)
class Step:
    """One traversal of an edge instance from ``tail`` to ``head``."""

    edge: Edge
    tail: str
    head: str

    def __post_init__(self):
        if {self.tail, self.head} != {self.edge.u, self.edge.v}:
            raise InputError(f"step {self.tail}->{self.head} does not match edge ({self.edge.u}, {self.edge.v})")


@dataclass(frozen=True)
class Path:
    """A walk of edge instances.

    ``real_length`` counts non-loop steps; ``padded_length`` counts all of
    them. Pass ``validate=False`` to build broken walks for adversarial tests.
    """

    steps: tuple[Step, ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not validate:
            return
        if not self.steps:
            raise StructureError("a path needs at least one edge")
        for a, b in zip(self.steps, self.steps[1:]):
            if a.head != b.tail:
                raise StructureError(f"steps {a.tail}->{a.head} and {b.tail}->{b.head} do not chain")
        loops = [s.edge.key for s in self.steps if s.edge.is_loop]
        if len(set(loops)) != len(loops):
            raise StructureError("padding loops must be distinct instances")
        if self.real_length < 1:
            raise StructureError("a path needs at least one non-loop edge")

    @property
    def source(self) -> str:
        return self.steps[0].tail

    @property
    def terminal(self) -> str:
        return self.steps[-1].head

    @property
    def real_length(self) -> int:
        return sum(1 for s in self.steps if not s.edge.is_loop)

    @property
    def padded_length(self) -> int:
        return len(self.steps)

    def vertices(self) -> list[str]:
        """w_0 .. w_l: the walk's vertex sequence."""
        return [self.steps[0].tail] + [s.head for s in self.steps]

    def edge_keys(self) -> set[tuple]:
        return {s.edge.key for s in self.steps}

    def contained_in(self, g: Multigraph) -> bool:
        keys = {e.key for e in g.edges}
        return all(s.edge.key in keys and s.edge in g.edges for s in self.steps)

    @classmethod
    def from_vertices(cls, g: Multigraph, walk: list[str]) -> Path:
        steps = []
        for a, b in zip(walk, walk[1:]):
            e = g.find_edge(a, b)
            if e is None:
                raise StructureError(f"no edge between {a} and {b}")
            steps.append(Step(e, a, b))
        return cls(tuple(steps))


def distances(g: Multigraph, src: str) -> dict[str, int]:
    """Hop distances from ``src`` ignoring loops."""
    if not g.has_vertex(src):
        raise InputError(f"unknown vertex {src!r}")
    dist = {src: 0}
    q = deque([src])
    while q:
        x = q.popleft()
        for y, _ in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


WeightFn = Callable[[Edge], float]


def shortest_path(g: Multigraph, src: str, dst: str, weight: WeightFn | None = None) -> Path | None:
    """Cheapest loop-free path; hop count unless ``weight`` is given."""
    for x in (src, dst):
        if not g.has_vertex(x):
            raise InputError(f"unknown vertex {x!r}")
    if src == dst:
        raise StructureError(f"source and terminal are the same vertex {src!r}")
    prev: dict[str, tuple[str, Edge]] = {}
    if weight is None:
        seen = {src}
        q = deque([src])
        while q and dst not in seen:
            x = q.popleft()
            for y, e in sorted(g.neighbors(x), key=lambda t: t[0]):
                if y not in seen:
                    seen.add(y)
                    prev[y] = (x, e)
                    q.append(y)
        if dst not in seen:
            return None
    else:
        best = {src: 0.0}
        heap = [(0.0, src)]
        done: set[str] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            if x == dst:
                break
            for y, e in g.neighbors(x):
                w = weight(e)
                if w < 0:
                    raise InputError("edge weights must be non-negative")
                nd = d + w
                if nd < best.get(y, float("inf")):
                    best[y] = nd
                    prev[y] = (x, e)
                    heapq.heappush(heap, (nd, y))
        if dst not in done:
            return None
    steps = []
    x = dst
    while x != src:
        p, e = prev[x]
        steps.append(Step(e, p, x))
        x = p
    return Path(tuple(reversed(steps)))


def padding_target(g: Multigraph) -> int:
    """Largest hop distance from any vertex to any boundary node it can reach."""
    if not g.boundary:
        raise StructureError("empty boundary set")
    best = 0
    reach: dict[str, bool] = {v: False for v in g.vertex_ids}
    for b in sorted(g.boundary):
        dist = distances(g, b)
        for v, d in dist.items():
            reach[v] = True
            best = max(best, d)
    stranded = sorted(v for v, ok in reach.items() if not ok)
    if stranded:
        raise StructureError(f"vertices reach no boundary node: {', '.join(stranded)}")
    return best


def augment(g: Multigraph, ell: int) -> Multigraph:
    """Attach ``ell`` fresh counter-numbered loops to every boundary node."""
    if isinstance(ell, bool) or not isinstance(ell, int) or ell < 1:
        raise InputError("augmentation length must be an integer >= 1")
    extra = []
    for b in sorted(g.boundary):
        start = len(g.loops_at(b))
        extra.extend(Edge(b, b, (), start + k) for k in range(1, ell + 1))
    return Multigraph(g.vertices, g.edges + tuple(extra), g.boundary)


def pad_path(path: Path, g: Multigraph, ell: int, at: str = "terminal") -> Path:
    """Extend ``path`` to ``ell`` steps with unused loops at one endpoint.

    Provider A pads at the terminal (its boundary node); provider B, whose
    walk starts at the boundary node, pads at the source.
    """
    if at not in ("terminal", "source"):
        raise InputError("at must be 'terminal' or 'source'")
    missing = ell - path.padded_length
    if missing < 0:
        raise StructureError(f"path has {path.padded_length} steps, more than the bound {ell}")
    if missing == 0:
        return path
    anchor = path.terminal if at == "terminal" else path.source
    used = path.edge_keys()
    free = [e for e in g.loops_at(anchor) if e.key not in used]
    if len(free) < missing:
        raise StructureError(
            f"need {missing} unused loops at the path endpoint, graph has {len(free)}")
    pad = tuple(Step(e, anchor, anchor) for e in free[:missing])
    steps = path.steps + pad if at == "terminal" else pad + path.steps
    return Path(steps)

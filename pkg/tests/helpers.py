"""Graph generators, certification shortcuts and oracles shared by the tests."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from topohide import pairing as pg
from topohide.clsdh import GraphSignature, HolderKey, holder_keygen, issue_graph_signature
from topohide.commitments import GraphCommitment, commit_endpoint, commit_graph
from topohide.connected import ConnectionProof, prove_connected
from topohide.monipoly import AuditorPublicKey, IssuerSecret, PublicParameters
from topohide.multigraph import Edge, Multigraph, Path, Vertex, augment, pad_path, padding_target, shortest_path

# filled by the performance test, printed in the terminal summary
perf_records: dict[str, float] = {}

LABELS = ("fiber", "free-space", "metro", "trusted-repeater", "satellite", "dark")


@dataclass
class Certified:
    """A provider's augmented graph with its private certification material."""

    graph: Multigraph
    length: int
    holder: HolderKey
    commitment: GraphCommitment
    signature: GraphSignature
    pk: AuditorPublicKey


def certify(pp: PublicParameters, issuer: IssuerSecret, base: Multigraph, rng: random.Random,
            length: int | None = None) -> Certified:
    ell = padding_target(base) if length is None else length
    g = augment(base, ell)
    holder = holder_keygen(pp, rng)
    gc = commit_graph(pp, g, rng)
    sig = issue_graph_signature(pp, issuer, holder, gc, g, rng)
    return Certified(g, ell, holder, gc, sig, issuer.public_key())


def prove(pp, cert: Certified, path: Path, rng, *, hide_source=False, hide_terminal=False, **kw):
    src = commit_endpoint(pp, path.source, rng) if hide_source else None
    dst = commit_endpoint(pp, path.terminal, rng) if hide_terminal else None
    proof = prove_connected(pp, cert.pk, cert.signature, cert.holder, cert.graph, cert.commitment, path,
                            source=src, terminal=dst, rng=rng, **kw)
    return proof, src, dst


def rebuild(proof: ConnectionProof, **changes) -> ConnectionProof:
    fields = dict(statement=proof.statement, graph_witnesses=proof.graph_witnesses,
                  path_witnesses=proof.path_witnesses, v_prime=proof.v_prime, partials=proof.partials,
                  announcements=proof.announcements, challenge=proof.challenge, responses=proof.responses)
    fields.update(changes)
    return ConnectionProof(**fields)


# graphs


def path_graph(n: int, boundary: tuple[str, ...] | None = None, prefix: str = "v") -> Multigraph:
    """v0 - v1 - ... - v{n-1}; boundary defaults to the last vertex."""
    ids = [f"{prefix}{i}" for i in range(n)]
    edges = [Edge(a, b) for a, b in zip(ids, ids[1:])]
    return Multigraph(tuple(Vertex(i) for i in ids), tuple(edges), frozenset(boundary or (ids[-1],)))


def random_connected_graph(rng: random.Random, n: int, extra: int = 0, n_boundary: int = 1,
                           max_loops: int = 0, labels: bool = True) -> Multigraph:
    """Random spanning tree plus ``extra`` chords, random labels and boundary loops."""
    ids = [f"n{i:02d}" for i in range(n)]
    rng.shuffle(ids)

    def labs(k):
        return tuple(rng.sample(LABELS, rng.randint(0, k))) if labels else ()

    verts = [Vertex(i, labs(2)) for i in ids]
    pairs = set()
    edges = []
    for i in range(1, n):
        j = rng.randrange(i)
        pairs.add(frozenset((ids[i], ids[j])))
        edges.append(Edge(ids[i], ids[j], labs(2)))
    candidates = [frozenset(p) for p in itertools.combinations(ids, 2) if frozenset(p) not in pairs]
    rng.shuffle(candidates)
    for p in candidates[:extra]:
        u, v = sorted(p)
        edges.append(Edge(u, v, labs(1)))
    boundary = sorted(rng.sample(ids, min(n_boundary, n)))
    for b in boundary:
        for c in range(1, rng.randint(0, max_loops) + 1):
            edges.append(Edge(b, b, labs(1), c))
    return Multigraph(tuple(verts), tuple(edges), frozenset(boundary))


def layered_graph(depth: int, n_vertices: int, n_edges: int, rng: random.Random) -> Multigraph:
    """Boundary node v0 at layer 0 and every other vertex at layer 1..depth.

    Extra edges stay within a layer or join adjacent layers, so hop distances
    to v0 equal the layer and the padding target is ``depth``. ``n_edges``
    counts non-loop edges.
    """
    layer = {"v0": 0}
    ids = ["v0"] + [f"v{i}" for i in range(1, n_vertices)]
    for k, vid in enumerate(ids[1:]):
        layer[vid] = k + 1 if k < depth else rng.randint(1, depth)
    by_layer: dict[int, list[str]] = {}
    for vid in ids:
        by_layer.setdefault(layer[vid], []).append(vid)
    edges, pairs = [], set()

    def add(u, v):
        key = frozenset((u, v))
        if u == v or key in pairs:
            return False
        pairs.add(key)
        edges.append(Edge(u, v, (rng.choice(LABELS),)))
        return True

    for vid in ids[1:]:
        add(vid, rng.choice(by_layer[layer[vid] - 1]))
    while len(edges) < n_edges:
        u = rng.choice(ids[1:])
        k = layer[u] + rng.choice((-1, 0, 1))
        if k in by_layer:
            add(u, rng.choice(by_layer[k]))
    return Multigraph(tuple(Vertex(i, ("site",)) for i in ids), tuple(edges), frozenset({"v0"}))


def padded(g: Multigraph, src: str, dst: str, ell: int, at: str) -> Path:
    return pad_path(shortest_path(g, src, dst), g, ell, at=at)


# oracles


def expand_oracle(messages) -> list[int]:
    """Coefficients of prod(Z + m) via elementary symmetric sums over subsets."""
    n = len(messages)
    coefs = []
    for k in range(n + 1):
        total = 0
        for subset in itertools.combinations(messages, n - k):
            prod = 1
            for m in subset:
                prod = prod * m % pg.P
            total = (total + prod) % pg.P
        coefs.append(total)
    return coefs


def all_pairs_hops(g: Multigraph) -> dict[tuple[str, str], int]:
    """Floyd-Warshall hop distances, ignoring loops."""
    ids = g.vertex_ids
    inf = float("inf")
    d = {(a, b): (0 if a == b else inf) for a in ids for b in ids}
    for e in g.edges:
        if not e.is_loop:
            d[e.u, e.v] = d[e.v, e.u] = 1
    for k in ids:
        for a in ids:
            for b in ids:
                if d[a, k] + d[k, b] < d[a, b]:
                    d[a, b] = d[a, k] + d[k, b]
    return d


def secret_needles(*, holder: HolderKey | None = None, issuer: IssuerSecret | None = None,
                   commitment: GraphCommitment | None = None, openings=()) -> list[bytes]:
    """Byte strings that must never appear in anything a verifier sees."""
    out = []
    if holder is not None:
        out.append(pg.encode_scalar(holder.sk))
    if issuer is not None:
        out += [pg.encode_scalar(issuer.x), pg.encode_scalar(issuer.x_prime)]
    if commitment is not None:
        out += [pg.encode_scalar(o) for o in commitment.openings.values()]
    for op in openings:
        out += [pg.encode_scalar(op.r1), pg.encode_scalar(op.r2)]
    return out

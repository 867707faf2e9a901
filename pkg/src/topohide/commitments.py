"""Pedersen commitments to endpoint identifiers and the multigraph commitment."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Mapping

from . import pairing as pg
from .errors import InputError, MalformedError, Verdict
from .monipoly import PublicParameters, assign_indices, encode_element
from .multigraph import Multigraph
from .pairing import G1Element, G2Element, P
from .wire import Reader, Writer


@dataclass(frozen=True)
class CommitmentPair:
    """(X01^x f^r1, X00^x f^r2): the public half of a hidden endpoint.

    Serves as (C1, C2) for a hidden source and as (C3, C4) for a hidden
    terminal; the two roles have identical structure.
    """

    first: G2Element
    second: G2Element

    def to_bytes(self) -> bytes:
        return Writer(b"THCM").point(self.first).point(self.second).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> CommitmentPair:
        r = Reader(data, b"THCM")
        out = cls(r.g2(), r.g2())
        r.done()
        return out


@dataclass(frozen=True)
class EndpointOpening:
    vertex_id: str
    x: int
    r1: int
    r2: int

    def __repr__(self) -> str:
        return "EndpointOpening(<redacted>)"

    def to_bytes(self) -> bytes:
        return Writer(b"THOP").text(self.vertex_id).scalar(self.x).scalar(self.r1).scalar(self.r2).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> EndpointOpening:
        r = Reader(data, b"THOP")
        out = cls(r.text(), r.scalar(), r.scalar(), r.scalar())
        r.done()
        return out


@dataclass(frozen=True)
class EndpointCommitments:
    pair: CommitmentPair
    opening: EndpointOpening


def commit_value(pp: PublicParameters, x: int, r1: int, r2: int) -> CommitmentPair:
    return CommitmentPair(pp.X[0][1] ** (x % P) * pp.f ** (r1 % P),
                          pp.X[0][0] ** (x % P) * pp.f ** (r2 % P))


def commit_endpoint(pp: PublicParameters, vertex_id: str, rng: random.Random | None = None,
                    *, r1: int | None = None, r2: int | None = None) -> EndpointCommitments:
    """Commit to a vertex identifier with fresh openings.

    ``r1``/``r2`` override the openings; only tests should pass them.
    """
    rng = rng or pg.system_rng()
    x = pg.vertex_scalar(vertex_id)
    r1 = pg.random_scalar(rng) if r1 is None else r1 % P
    r2 = pg.random_scalar(rng) if r2 is None else r2 % P
    return EndpointCommitments(commit_value(pp, x, r1, r2), EndpointOpening(vertex_id, x, r1, r2))


def verify_opening(pp: PublicParameters, pair: CommitmentPair, opening: EndpointOpening) -> Verdict:
    """Check both commitment equations; the reject code names the failing one."""
    if opening.x != pg.vertex_scalar(opening.vertex_id):
        return Verdict.reject("opening:id", "scalar does not match the vertex id")
    expect = commit_value(pp, opening.x, opening.r1, opening.r2)
    if expect.first != pair.first:
        return Verdict.reject("opening:first")
    if expect.second != pair.second:
        return Verdict.reject("opening:second")
    return Verdict.accept()


@dataclass(frozen=True)
class GraphCommitment:
    """C = prod over elements of encode(element)^{o_element}.

    ``openings`` and ``indices`` are keyed by element key and belong to the
    provider's private store; only ``value`` is ever published.
    """

    value: G1Element
    openings: Mapping[tuple, int]
    indices: Mapping[tuple, int]

    def __repr__(self) -> str:
        return f"GraphCommitment(elements={len(self.openings)})"

    def element_commitment(self, pp: PublicParameters, elem) -> G1Element:
        return encode_element(pp, elem, self.indices[elem.key]) ** self.openings[elem.key]

    def matches(self, pp: PublicParameters, g: Multigraph) -> bool:
        keys = {e.key for e in g.elements()}
        if keys != set(self.openings) or keys != set(self.indices):
            return False
        return recompute_commitment(pp, g, self.openings, self.indices) == self.value

    def to_bytes(self) -> bytes:
        w = Writer(b"THGC").point(self.value).u32(len(self.openings))
        for key in sorted(self.openings, key=lambda k: (self.indices[k], k)):
            w.text(json.dumps(list(key))).u32(self.indices[key]).scalar(self.openings[key])
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> GraphCommitment:
        r = Reader(data, b"THGC")
        value = r.g1()
        openings, indices = {}, {}
        for _ in range(r.u32()):
            try:
                key = tuple(json.loads(r.text()))
            except (ValueError, TypeError):
                raise MalformedError("bad element key") from None
            indices[key] = r.u32()
            openings[key] = r.scalar()
        r.done()
        return cls(value, openings, indices)


def recompute_commitment(pp: PublicParameters, g: Multigraph, openings: Mapping[tuple, int],
                         indices: Mapping[tuple, int]) -> G1Element:
    out = pg.G1.neutral_element()
    for elem in g.elements():
        out = out * (encode_element(pp, elem, indices[elem.key]) ** openings[elem.key])
    return out


def commit_graph(pp: PublicParameters, g: Multigraph, rng: random.Random | None = None, *,
                 indices: Mapping[tuple, int] | None = None,
                 openings: Mapping[tuple, int] | None = None) -> GraphCommitment:
    """Commit to every vertex and edge instance with a fresh opening each.

    Existing ``indices``/``openings`` are reused for elements they cover,
    which makes the commitment multiplicative under graph extension.
    """
    rng = rng or pg.system_rng()
    if g.size > pp.L_max:
        raise InputError(f"graph has {g.size} elements, parameters allow {pp.L_max}")
    idx = assign_indices(g, indices, pp.L_max)
    ops = {}
    for elem in g.elements():
        if openings is not None and elem.key in openings:
            ops[elem.key] = openings[elem.key] % P
        else:
            ops[elem.key] = pg.random_scalar(rng)
    value = recompute_commitment(pp, g, ops, idx)
    return GraphCommitment(value, ops, idx)

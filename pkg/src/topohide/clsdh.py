"""CL-SDH signatures on message sets and on committed multigraphs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import pairing as pg
from . import sigma
from .commitments import GraphCommitment
from .errors import InputError, IssuanceRefused, MalformedError, Verdict
from .monipoly import AuditorPublicKey, IssuerSecret, PublicParameters, encode_element, mp_encode
from .multigraph import Multigraph
from .pairing import G1Element, P
from .wire import Reader, Writer


@dataclass(frozen=True)
class HolderKey:
    sk: int
    public: G1Element

    def __post_init__(self):
        if self.sk % P == 0:
            raise InputError("holder secret must be nonzero")

    def __repr__(self) -> str:
        return "HolderKey(<redacted>)"

    def to_bytes(self) -> bytes:
        return Writer(b"THHK").scalar(self.sk).point(self.public).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> HolderKey:
        r = Reader(data, b"THHK")
        sk, pub = r.scalar(), r.g1()
        r.done()
        if sk == 0:
            raise MalformedError("holder secret is zero")
        return cls(sk, pub)


def holder_keygen(pp: PublicParameters, rng: random.Random | None = None) -> HolderKey:
    sk = pg.random_scalar(rng or pg.system_rng())
    return HolderKey(sk, pp.h ** sk)


def _fresh_t(issuer: IssuerSecret, rng: random.Random) -> int:
    while True:
        t = pg.random_scalar(rng)
        if (issuer.x + t) % P:
            return t


# signatures on message sets


@dataclass(frozen=True)
class SetSignature:
    t: int
    s: int
    v: G1Element


def _set_base(pp: PublicParameters, messages: Sequence[int]) -> G1Element:
    if len(messages) > pp.n_max:
        raise InputError(f"message set of size {len(messages)} exceeds n_max={pp.n_max}")
    coefs = mp_encode(messages)
    return pg.g1_multiexp(pp.a[0][: len(coefs)], coefs)


def sign_set(pp: PublicParameters, issuer: IssuerSecret, messages: Sequence[int],
             rng: random.Random | None = None) -> SetSignature:
    rng = rng or pg.system_rng()
    t, s = _fresh_t(issuer, rng), pg.random_scalar(rng)
    inv = pow((issuer.x + t) % P, -1, P)
    v = (_set_base(pp, messages) * pp.b ** s * pp.c) ** inv
    return SetSignature(t, s, v)


def verify_set(pp: PublicParameters, pk: AuditorPublicKey, sig: SetSignature, messages: Sequence[int]) -> Verdict:
    if sig.v.is_neutral_element():
        return Verdict.reject("pairing", "identity signature element")
    lhs = sig.v.pair(pk.X)
    rhs = (_set_base(pp, messages) * pp.b ** (sig.s % P) * pp.c * sig.v ** (-sig.t % P)).pair(pp.g2)
    return Verdict.accept() if lhs == rhs else Verdict.reject("pairing")


# signatures on committed multigraphs


@dataclass(frozen=True)
class GraphSignature:
    t: int
    s: int
    v: G1Element
    graph_digest: bytes
    auditor_key_id: bytes

    def to_bytes(self) -> bytes:
        return (Writer(b"THSG").scalar(self.t).scalar(self.s).point(self.v)
                .raw(self.graph_digest).raw(self.auditor_key_id).getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> GraphSignature:
        r = Reader(data, b"THSG")
        out = cls(r.scalar(), r.scalar(), r.g1(), r.take(32), r.take(32))
        r.done()
        return out


@dataclass(frozen=True)
class IssuanceRequest:
    """What the holder sends: the graph, its commitment and a proof of openings."""

    graph: Multigraph
    indices: Mapping[tuple, int]
    commitment: G1Element
    holder_public: G1Element
    challenge: int
    responses: Mapping[str, int]

    def to_bytes(self) -> bytes:
        w = Writer(b"THIR").blob(self.graph.canonical_bytes())
        w.u32(len(self.indices))
        for key in sorted(self.indices, key=lambda k: self.indices[k]):
            w.text("/".join(map(str, key))).u32(self.indices[key])
        w.point(self.commitment).point(self.holder_public).scalar(self.challenge)
        for name in sorted(self.responses):
            w.text(name).scalar(self.responses[name])
        return w.getvalue()


def _issuance_relations(pp: PublicParameters, graph: Multigraph, indices: Mapping[tuple, int],
                        commitment: G1Element, holder_public: G1Element) -> list[sigma.Relation]:
    encs = [(f"o:{indices[e.key]}", encode_element(pp, e, indices[e.key])) for e in graph.elements()]

    def phi_c(w):
        return pg.g1_multiexp([b for _, b in encs], [w[n] for n, _ in encs])

    return [
        sigma.Relation("holder", ("sk",), lambda w: pp.h ** w["sk"], holder_public),
        sigma.Relation("commitment", tuple(n for n, _ in encs), phi_c, commitment),
    ]


def _issuance_transcript(pp, graph, commitment, holder_public, announcements) -> sigma.Transcript:
    tr = sigma.Transcript(b"topohide/issuance/v1")
    tr.append(b"pp", pp.digest())
    tr.append(b"graph", graph.digest())
    tr.append_points(b"statement", [commitment, holder_public])
    tr.append_points(b"announce", announcements)
    return tr


def request_signature(pp: PublicParameters, holder: HolderKey, graph: Multigraph, gc: GraphCommitment,
                      rng: random.Random | None = None) -> IssuanceRequest:
    rng = rng or pg.system_rng()
    rels = _issuance_relations(pp, graph, gc.indices, gc.value, holder.public)
    witness = {"sk": holder.sk}
    witness.update({f"o:{gc.indices[e.key]}": gc.openings[e.key] for e in graph.elements()})
    nonces, ann = sigma.commit(rels, rng)
    c = _issuance_transcript(pp, graph, gc.value, holder.public, ann).challenge()
    return IssuanceRequest(graph, dict(gc.indices), gc.value, holder.public, c,
                           sigma.respond(nonces, witness, c))


def sign_request(pp: PublicParameters, issuer: IssuerSecret, req: IssuanceRequest,
                 rng: random.Random | None = None) -> GraphSignature:
    """Auditor side: check the opening proof against the disclosed graph, then sign."""
    rng = rng or pg.system_rng()
    keys = [e.key for e in req.graph.elements()]
    if set(keys) != set(req.indices) or len(set(req.indices.values())) != len(keys):
        raise IssuanceRefused("element indices do not cover the graph one-to-one")
    if any(not 1 <= i <= pp.L_max for i in req.indices.values()):
        raise IssuanceRefused("element index outside the parameter range")
    if req.commitment.is_neutral_element() or req.holder_public.is_neutral_element():
        raise IssuanceRefused("identity commitment or holder key")
    try:
        rels = _issuance_relations(pp, req.graph, req.indices, req.commitment, req.holder_public)
    except InputError as exc:
        raise IssuanceRefused(str(exc)) from None
    names = sigma.all_variables(rels)
    if set(req.responses) != set(names):
        raise IssuanceRefused("response set does not match the graph")
    c = req.challenge
    ann = [rel.phi(req.responses) * rel.target ** (-c % P) for rel in rels]
    if _issuance_transcript(pp, req.graph, req.commitment, req.holder_public, ann).challenge() != c:
        raise IssuanceRefused("commitment does not open to the disclosed graph")
    t, s = _fresh_t(issuer, rng), pg.random_scalar(rng)
    inv = pow((issuer.x + t) % P, -1, P)
    v = (req.holder_public * req.commitment * pp.b ** s * pp.c) ** inv
    return GraphSignature(t, s, v, req.graph.digest(), issuer.public_key().key_id)


def issue_graph_signature(pp: PublicParameters, issuer: IssuerSecret, holder: HolderKey,
                          gc: GraphCommitment, graph: Multigraph,
                          rng: random.Random | None = None) -> GraphSignature:
    """Run both sides of issuance in-process."""
    rng = rng or pg.system_rng()
    return sign_request(pp, issuer, request_signature(pp, holder, graph, gc, rng), rng)


def verify_graph_signature(pp: PublicParameters, pk: AuditorPublicKey, sig: GraphSignature,
                           holder_public: G1Element, graph: Multigraph, gc: GraphCommitment) -> Verdict:
    """Holder-side check of a graph signature against the graph and its openings."""
    if sig.auditor_key_id != pk.key_id:
        return Verdict.reject("auditor", "signature made under a different auditor key")
    if sig.graph_digest != graph.digest():
        return Verdict.reject("graph", "signature names a different graph")
    try:
        if not gc.matches(pp, graph):
            return Verdict.reject("commitment", "openings do not reproduce the commitment")
    except (InputError, KeyError):
        return Verdict.reject("commitment", "graph does not fit the commitment openings")
    if sig.v.is_neutral_element():
        return Verdict.reject("pairing", "identity signature element")
    lhs = sig.v.pair(pk.X)
    rhs = (holder_public * gc.value * pp.b ** (sig.s % P) * pp.c * sig.v ** (-sig.t % P)).pair(pp.g2)
    return Verdict.accept() if lhs == rhs else Verdict.reject("pairing")


@dataclass(frozen=True)
class SignatureRandomization:
    """Presentation-time randomization of a graph signature.

    v' = v^r; the proof then shows knowledge of zeta = sk*r, rho = s*r,
    omega = r and tau = t. The signature exponent s is used unchanged.
    """

    r: int
    v_prime: G1Element
    zeta: int
    rho: int
    omega: int
    tau: int


def randomize(sig: GraphSignature, holder: HolderKey, rng: random.Random | None = None) -> SignatureRandomization:
    r = pg.random_scalar(rng or pg.system_rng())
    return SignatureRandomization(r, sig.v ** r, holder.sk * r % P, sig.s * r % P, r, sig.t % P)

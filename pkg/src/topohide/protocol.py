"""Certification and path-proof sessions between auditors, providers and a customer.

Roles are sequential actors exchanging messages over an in-process
``ChannelFabric``. The fabric keeps an append-only session log of
(time, from, to, type, digest) records; confidential messages are logged
without a digest so the log never fingerprints secrets.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from . import pairing as pg
from .clsdh import (GraphSignature, HolderKey, holder_keygen, request_signature,
                    sign_request, verify_graph_signature)
from .commitments import CommitmentPair, EndpointCommitments, GraphCommitment, commit_endpoint, commit_graph, \
    verify_opening
from .connected import ConnectionProof, bind_shared_commitment, prove_connected
from .errors import (IssuanceRefused, MalformedError, NoPathError, ProofRefused, RoutingError, StructureError)
from .monipoly import AuditorPublicKey, IssuerSecret, PublicParameters
from .multigraph import Multigraph, augment, distances, pad_path, padding_target, shortest_path
from .wire import Writer


class SessionVerdict(str, Enum):
    ACCEPT = "accept"
    NO_PATH = "no-path"
    PROOF_INVALID = "proof-invalid"
    COMMITMENT_MISMATCH = "commitment-mismatch"
    CHANNEL_FAILURE = "channel-failure"
    STATEMENT_MISMATCH = "statement-mismatch"
    OPENING_INVALID = "opening-invalid"
    PROVER_REFUSED = "prover-refused"


VARIANTS = ("honest", "wrong-boundary", "stale-signature", "mismatched-commitments",
            "mismatched-length", "tampered-proof")


# channel fabric


@dataclass(frozen=True)
class LogEntry:
    t: int
    sender: str
    recipient: str
    msg_type: str
    digest: str | None

    def to_dict(self) -> dict:
        return {"t": self.t, "from": self.sender, "to": self.recipient, "type": self.msg_type,
                "digest": self.digest}


@dataclass(frozen=True)
class Receipt:
    seq: int
    t: int
    sender: str
    recipient: str
    msg_type: str


@dataclass(frozen=True)
class Message:
    sender: str
    msg_type: str
    payload: Any
    data: bytes
    confidential: bool


class ChannelFabric:
    """Authenticated point-to-point links with per-pair FIFO delivery.

    Payloads travel as objects alongside their canonical bytes; the bytes
    are what the log digests and what leakage scans inspect.
    """

    def __init__(self):
        self._inbox: dict[str, deque[Message]] = {}
        self._clock = 0
        self._seq = 0
        self._failed: set[frozenset[str]] = set()
        self.log: list[LogEntry] = []
        self.delivered: dict[str, list[Message]] = {}

    def register(self, role_id: str) -> None:
        if role_id in self._inbox:
            raise RoutingError(f"role {role_id!r} already registered")
        self._inbox[role_id] = deque()
        self.delivered[role_id] = []

    def fail_link(self, a: str, b: str) -> None:
        self._failed.add(frozenset((a, b)))

    def send(self, sender: str, recipient: str, msg_type: str, payload: Any, data: bytes,
             confidential: bool = False) -> Receipt:
        if sender not in self._inbox:
            raise RoutingError(f"unknown sender {sender!r}")
        if recipient not in self._inbox:
            raise RoutingError(f"unknown recipient {recipient!r}")
        if frozenset((sender, recipient)) in self._failed:
            raise RoutingError(f"link {sender} -> {recipient} is down")
        self._clock += 1
        self._seq += 1
        msg = Message(sender, msg_type, payload, bytes(data), confidential)
        self._inbox[recipient].append(msg)
        self.delivered[recipient].append(msg)
        digest = None if confidential else hashlib.sha256(data).hexdigest()
        self.log.append(LogEntry(self._clock, sender, recipient, msg_type, digest))
        return Receipt(self._seq, self._clock, sender, recipient, msg_type)

    def secure_send(self, sender: str, recipient: str, msg_type: str, payload: Any, data: bytes) -> Receipt:
        """Confidential delivery: contents reach the recipient only."""
        return self.send(sender, recipient, msg_type, payload, data, confidential=True)

    def receive(self, recipient: str, msg_type: str | None = None, sender: str | None = None) -> Message:
        """Pop the oldest matching message for ``recipient``."""
        box = self._inbox.get(recipient)
        if box is None:
            raise RoutingError(f"unknown recipient {recipient!r}")
        for i, msg in enumerate(box):
            if (msg_type is None or msg.msg_type == msg_type) and (sender is None or msg.sender == sender):
                del box[i]
                return msg
        raise RoutingError(f"no {msg_type or 'pending'} message for {recipient}")

    def transcript(self) -> list[dict]:
        return [e.to_dict() for e in self.log]

    def transcript_json(self) -> str:
        return json.dumps(self.transcript(), indent=2) + "\n"

    def visible_bytes(self, role_id: str) -> bytes:
        """Everything ``role_id`` can observe: the log plus its own deliveries."""
        return self.transcript_json().encode() + b"".join(m.data for m in self.delivered.get(role_id, []))


# roles


@dataclass
class Auditor:
    id: str
    pp: PublicParameters
    issuer: IssuerSecret
    certified: dict[str, bytes] = field(default_factory=dict)

    @property
    def public_key(self) -> AuditorPublicKey:
        return self.issuer.public_key()


@dataclass
class Provider:
    id: str
    pp: PublicParameters
    graph: Multigraph
    holder: HolderKey
    auditor_key: AuditorPublicKey | None = None
    length: int | None = None
    augmented: Multigraph | None = None
    commitment: GraphCommitment | None = None
    signature: GraphSignature | None = None
    previous_signature: GraphSignature | None = None


@dataclass
class Customer:
    id: str
    pp: PublicParameters
    auditor_keys: dict[bytes, AuditorPublicKey] = field(default_factory=dict)
    certifications: dict[str, tuple[int, bytes]] = field(default_factory=dict)


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    boundary_commitment: CommitmentPair | None
    proofs: tuple[bytes, ...]
    verdict: SessionVerdict
    detail: str = ""


def _cert_bytes(provider_id: str, length: int, key_id: bytes) -> bytes:
    return Writer(b"THCR").text(provider_id).u16(length).raw(key_id).getvalue()


def run_phase1(provider: Provider, auditor: Auditor, fabric: ChannelFabric, customer: Customer | None = None,
               rng: random.Random | None = None) -> GraphSignature:
    """Certify the provider's topology: pad, commit, request and receive a signature."""
    rng = rng or pg.system_rng()
    pp = provider.pp
    length = padding_target(provider.graph)
    augmented = augment(provider.graph, length)
    gc = commit_graph(pp, augmented, rng)
    req = request_signature(pp, provider.holder, augmented, gc, rng)
    fabric.secure_send(provider.id, auditor.id, "sig-request", (provider.graph, req),
                       provider.graph.canonical_bytes() + req.to_bytes())

    msg = fabric.receive(auditor.id, "sig-request", provider.id)
    base, request = msg.payload
    ell = padding_target(base)
    if augment(base, ell) != request.graph:
        raise IssuanceRefused("submitted graph is not the padded topology")
    sig = sign_request(pp, auditor.issuer, request, rng)
    auditor.certified[provider.id] = request.graph.digest()
    fabric.secure_send(auditor.id, provider.id, "signature", sig, sig.to_bytes())
    if customer is not None:
        record = (provider.id, ell, auditor.public_key.key_id)
        fabric.send(auditor.id, customer.id, "certification", record, _cert_bytes(*record))

    sig = fabric.receive(provider.id, "signature", auditor.id).payload
    pk = auditor.public_key
    if not verify_graph_signature(pp, pk, sig, provider.holder.public, augmented, gc):
        raise IssuanceRefused("auditor returned an invalid signature")
    if provider.signature is not None:
        provider.previous_signature = provider.signature
    provider.auditor_key, provider.length = pk, length
    provider.augmented, provider.commitment, provider.signature = augmented, gc, sig
    if customer is not None:
        cmsg = fabric.receive(customer.id, "certification", auditor.id)
        pid, ell_c, key_id = cmsg.payload
        customer.auditor_keys.setdefault(pk.key_id, pk)
        customer.certifications[pid] = (ell_c, key_id)
    return sig


def boundary_costs(g: Multigraph, anchor: str) -> dict[str, int]:
    """Hop cost from ``anchor`` to every reachable boundary node."""
    dist = distances(g, anchor)
    return {b: dist[b] for b in sorted(g.boundary) if b in dist}


def select_boundary(costs_a: Mapping[str, int], costs_b: Mapping[str, int]) -> str | None:
    """Shared boundary node with minimum total cost; ties go to the smaller id.

    Zero-cost entries mean the anchor is itself the boundary node, which a
    proof cannot express, so they are skipped.
    """
    shared = sorted(b for b in set(costs_a) & set(costs_b) if costs_a[b] > 0 and costs_b[b] > 0)
    if not shared:
        return None
    return min(shared, key=lambda b: (costs_a[b] + costs_b[b], b))


def agree_boundary(a: Provider, b: Provider, source: str, dest: str, fabric: ChannelFabric | None = None) -> str:
    """Cleartext stand-in for the two-party cost minimization.

    Only the two providers see the costs; the customer never does.
    """
    if not a.graph.has_vertex(source) or not b.graph.has_vertex(dest):
        raise NoPathError("endpoint not in the provider topology")
    costs_a = boundary_costs(a.graph, source)
    costs_b = boundary_costs(b.graph, dest)
    if fabric is not None:
        fabric.secure_send(a.id, b.id, "boundary-costs", costs_a, json.dumps(costs_a, sort_keys=True).encode())
        costs_a = fabric.receive(b.id, "boundary-costs", a.id).payload
    choice = select_boundary(costs_a, costs_b)
    if choice is None:
        raise NoPathError("no shared boundary node connects the endpoints")
    return choice


def _prove_leg(p: Provider, src: str, dst: str, at: str, rng, *, length=None, source=None, terminal=None,
               signature=None, strict=True) -> ConnectionProof:
    base = shortest_path(p.augmented, src, dst)
    if base is None:
        raise NoPathError(f"{src} and {dst} are not connected")
    ell = p.length if length is None else length
    path = pad_path(base, p.augmented, ell, at=at)
    return prove_connected(p.pp, p.auditor_key, signature or p.signature, p.holder, p.augmented, p.commitment,
                           path, source=source, terminal=terminal, rng=rng, strict=strict)


def customer_check(customer: Customer, source: str, dest: str, provider_a: str, provider_b: str,
                   data_a: bytes, data_b: bytes) -> tuple[SessionVerdict, str]:
    try:
        proof_a = ConnectionProof.from_bytes(data_a)
        proof_b = ConnectionProof.from_bytes(data_b)
    except MalformedError as exc:
        return SessionVerdict.PROOF_INVALID, f"malformed proof: {exc}"
    for proof, pid, end, name in ((proof_a, provider_a, source, "source"), (proof_b, provider_b, dest, "terminal")):
        cert = customer.certifications.get(pid)
        st = proof.statement
        if cert is None:
            return SessionVerdict.STATEMENT_MISMATCH, f"{pid} is not certified"
        ell, key_id = cert
        if st.length != ell:
            return SessionVerdict.STATEMENT_MISMATCH, f"{pid} proved length {st.length}, certified {ell}"
        if st.auditor_key_id != key_id:
            return SessionVerdict.STATEMENT_MISMATCH, f"{pid} proof names the wrong auditor"
        if getattr(st, name) != end:
            return SessionVerdict.STATEMENT_MISMATCH, f"{pid} proof has the wrong public {name}"
    pk_a = customer.auditor_keys[customer.certifications[provider_a][1]]
    pk_b = customer.auditor_keys[customer.certifications[provider_b][1]]
    v = bind_shared_commitment(customer.pp, proof_a, pk_a, proof_b, pk_b)
    if v:
        return SessionVerdict.ACCEPT, ""
    if v.code == "bind":
        return SessionVerdict.COMMITMENT_MISMATCH, v.detail
    return SessionVerdict.PROOF_INVALID, v.detail


def _tamper(data: bytes) -> bytes:
    proof = ConnectionProof.from_bytes(data)
    resp = list(proof.responses)
    resp[len(resp) // 2] = (resp[len(resp) // 2] + 1) % pg.P
    return ConnectionProof(proof.statement, proof.graph_witnesses, proof.path_witnesses, proof.v_prime,
                           proof.partials, proof.announcements, proof.challenge, tuple(resp)).to_bytes()


def run_phase2(a: Provider, b: Provider, customer: Customer, source: str, dest: str, fabric: ChannelFabric,
               rng: random.Random | None = None, variant: str = "honest",
               session_id: str = "session-1") -> SessionRecord:
    """Prove S -> BN at provider A and BN -> D at provider B, then let the customer decide.

    ``variant`` injects one misbehaviour for testing; see ``VARIANTS``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    rng = rng or pg.system_rng()
    pp = customer.pp
    fail = lambda verdict, detail="", pair=None, proofs=(): SessionRecord(  # noqa: E731
        session_id, pair, tuple(proofs), verdict, detail)

    try:
        req = Writer(b"THRQ").text(source).text(dest).getvalue()
        fabric.send(customer.id, a.id, "connect-request", (source, dest), req)
        fabric.send(customer.id, b.id, "connect-request", (source, dest), req)
        fabric.receive(a.id, "connect-request")
        fabric.receive(b.id, "connect-request")

        try:
            bn = agree_boundary(a, b, source, dest, fabric)
        except NoPathError as exc:
            fabric.send(a.id, customer.id, "no-path", None, b"no-path")
            fabric.receive(customer.id, "no-path")
            return fail(SessionVerdict.NO_PATH, str(exc))

        ec = commit_endpoint(pp, bn, rng)
        fabric.secure_send(a.id, b.id, "opening", ec, ec.pair.to_bytes() + ec.opening.to_bytes())
        got: EndpointCommitments = fabric.receive(b.id, "opening", a.id).payload
        if not verify_opening(pp, got.pair, got.opening):
            return fail(SessionVerdict.OPENING_INVALID, "boundary opening does not verify", ec.pair)

        try:
            if variant == "stale-signature":
                stale = _recertify(a, rng)
                proof_a = _prove_leg(a, source, bn, "terminal", rng, terminal=ec, signature=stale, strict=False)
            elif variant == "mismatched-length":
                proof_a = _prove_leg(a, source, bn, "terminal", rng, terminal=ec, length=a.length + 1)
            else:
                proof_a = _prove_leg(a, source, bn, "terminal", rng, terminal=ec)
            b_source = got
            b_anchor = bn
            if variant == "wrong-boundary":
                others = sorted(x for x in b.graph.boundary if x != bn and x in distances(b.augmented, dest))
                b_anchor = others[0] if others else bn
                b_source = commit_endpoint(pp, b_anchor, rng)
            elif variant == "mismatched-commitments":
                b_source = commit_endpoint(pp, bn, rng)
            proof_b = _prove_leg(b, b_anchor, dest, "source", rng, source=b_source)
        except NoPathError as exc:
            fabric.send(a.id, customer.id, "no-path", None, b"no-path")
            fabric.receive(customer.id, "no-path")
            return fail(SessionVerdict.NO_PATH, str(exc), ec.pair)
        except (ProofRefused, StructureError) as exc:
            return fail(SessionVerdict.PROVER_REFUSED, str(exc), ec.pair)

        data_a, data_b = proof_a.to_bytes(), proof_b.to_bytes()
        if variant == "tampered-proof":
            data_a = _tamper(data_a)
        fabric.send(a.id, customer.id, "proof", None, data_a)
        fabric.send(b.id, customer.id, "proof", None, data_b)
        data_a = fabric.receive(customer.id, "proof", a.id).data
        data_b = fabric.receive(customer.id, "proof", b.id).data
    except RoutingError as exc:
        return fail(SessionVerdict.CHANNEL_FAILURE, str(exc))

    verdict, detail = customer_check(customer, source, dest, a.id, b.id, data_a, data_b)
    return SessionRecord(session_id, proof_a.statement.terminal, (data_a, data_b), verdict, detail)


def _recertify(p: Provider, rng) -> GraphSignature:
    """Model a refreshed commitment presented with the signature on the old one."""
    stale = p.signature
    gc = commit_graph(p.pp, p.augmented, rng)
    p.commitment = gc
    return stale


def make_roles(pp: PublicParameters, issuer_a: IssuerSecret, issuer_b: IssuerSecret, graph_a: Multigraph,
               graph_b: Multigraph, rng: random.Random) -> tuple[Auditor, Auditor, Provider, Provider, Customer,
                                                                 ChannelFabric]:
    """Standard cast: two auditors, two providers, one customer, on a fresh fabric."""
    fabric = ChannelFabric()
    aud_a, aud_b = Auditor("auditor-a", pp, issuer_a), Auditor("auditor-b", pp, issuer_b)
    prov_a = Provider("provider-a", pp, graph_a, holder_keygen(pp, rng))
    prov_b = Provider("provider-b", pp, graph_b, holder_keygen(pp, rng))
    cust = Customer("customer", pp)
    for role in (aud_a, aud_b, prov_a, prov_b, cust):
        fabric.register(role.id)
    return aud_a, aud_b, prov_a, prov_b, cust, fabric


def simulate(pp: PublicParameters, issuer_a: IssuerSecret, issuer_b: IssuerSecret, graph_a: Multigraph,
             graph_b: Multigraph, source: str, dest: str, rng: random.Random | None = None,
             variant: str = "honest") -> tuple[SessionRecord, ChannelFabric]:
    """Phases 1 and 2 end to end."""
    rng = rng or pg.system_rng()
    aud_a, aud_b, prov_a, prov_b, cust, fabric = make_roles(pp, issuer_a, issuer_b, graph_a, graph_b, rng)
    try:
        run_phase1(prov_a, aud_a, fabric, cust, rng)
        run_phase1(prov_b, aud_b, fabric, cust, rng)
    except RoutingError as exc:
        return SessionRecord("session-1", None, (), SessionVerdict.CHANNEL_FAILURE, str(exc)), fabric
    record = run_phase2(prov_a, prov_b, cust, source, dest, fabric, rng, variant)
    return record, fabric

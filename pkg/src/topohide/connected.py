"""Zero-knowledge proof that a signed multigraph holds a path of public length.

The prover shows, for a graph signed by an auditor, that some walk of
exactly ``length`` edge instances joins the source and the terminal. Either
endpoint may be public (a vertex id) or hidden in a ``CommitmentPair``. The
real hop count, the intermediate vertices and the rest of the topology stay
hidden; padding loops make every real length look alike.

Realization
-----------
Let r randomize the signature (v' = v^r) and let every element e of the
graph have commitment C_e = enc_e^{o_e}, so that e(C, g2)^r is the product
over elements of e(C_e, g2)^r. The prover publishes one G1 witness per
element:

* non-path element: W'_e = enc(rest_e)^{o_e r / r_e}, where ``rest`` drops
  the element's leading vertex scalar ``lead``; then
  e(W'_e, X01^{r_e} X00^{r_e lead}) = e(C_e, g2)^r.
* path position k with edge {w_{k-1}, w_k}: W'_k = enc(rest)^{o r / r_path}
  with ``rest`` dropping both endpoints; then
  e(W'_k, X02^{r_path} X01^{r_path (w_{k-1} + w_k)} X00^{r_path w_{k-1} w_k})
  = e(C_k, g2)^r. Consecutive positions share the middle exponent
  eps1:k = r_path w_k, which chains the walk. Endpoint terms come from the
  commitments when an endpoint is hidden, and the commitment blinding is
  cancelled with f^q (position 1) and f^z (position length).

Each pairing group is published blinded as a partial P = (group value) *
B^kappa with B = e(g1, f). The verifier derives the signature partial as
e(v', X) / (P_graph * prod P_k), whose kappa is minus the sum of the others,
and checks a separate linear proof per group. That keeps every check a
linear-exponent relation and lets rejections name the failing group.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import pairing as pg
from . import sigma
from .clsdh import GraphSignature, HolderKey, randomize, verify_graph_signature
from .commitments import CommitmentPair, EndpointCommitments, GraphCommitment, verify_opening
from .errors import MalformedError, ProofRefused, Verdict
from .monipoly import AuditorPublicKey, PublicParameters, element_messages, encode_messages
from .multigraph import Multigraph, Path
from .pairing import G2, GT, P
from .wire import Reader, Writer

DOMAIN = b"topohide/connected/v1"

# statement


@dataclass(frozen=True)
class PathStatement:
    """Public claim: a walk of ``length`` edges from ``source`` to ``terminal``."""

    length: int
    source: str | CommitmentPair
    terminal: str | CommitmentPair
    auditor_key_id: bytes
    pp_digest: bytes
    n_vertices: int
    n_edges: int

    @property
    def source_hidden(self) -> bool:
        return isinstance(self.source, CommitmentPair)

    @property
    def terminal_hidden(self) -> bool:
        return isinstance(self.terminal, CommitmentPair)

    @property
    def n_graph_witnesses(self) -> int:
        return self.n_vertices + self.n_edges - self.length

    def to_bytes(self) -> bytes:
        w = (Writer(b"THST").u16(self.length).u32(self.n_vertices).u32(self.n_edges)
             .raw(self.pp_digest).raw(self.auditor_key_id))
        for end in (self.source, self.terminal):
            if isinstance(end, CommitmentPair):
                w.u8(1).point(end.first).point(end.second)
            else:
                w.u8(0).text(end)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> PathStatement:
        r = Reader(data, b"THST")
        length, nv, ne = r.u16(), r.u32(), r.u32()
        pp_digest, key_id = r.take(32), r.take(32)
        ends = []
        for _ in range(2):
            kind = r.u8()
            if kind == 1:
                ends.append(CommitmentPair(r.g2(), r.g2()))
            elif kind == 0:
                ends.append(r.text())
            else:
                raise MalformedError(f"unknown endpoint kind {kind}")
        r.done()
        return cls(length, ends[0], ends[1], key_id, pp_digest, nv, ne)

    def digest(self) -> bytes:
        return hashlib.sha256(b"topohide-statement\x00" + self.to_bytes()).digest()


# epsilon schedule


@dataclass(frozen=True)
class EpsilonSchedule:
    """Path exponents: eps2 shared by every position, eps1:k joining positions
    k and k+1 (k = 1..length-1), eps0:k the product term at middle positions
    (k = 2..length-1). The last position has no row of its own; the terminal
    commitment (or public id) supplies it.
    """

    eps2: int
    eps1: tuple[int, ...]
    eps0: tuple[int, ...]

    def eps1_at(self, k: int) -> int:
        return self.eps1[k - 1]

    def eps0_at(self, k: int) -> int:
        return self.eps0[k - 2]


def build_epsilon_schedule(path: Path, r_path: int, align: str = "head") -> EpsilonSchedule:
    """Schedule for ``path`` under path randomizer ``r_path``.

    On a valid walk both alignments agree. On a broken walk, ``"head"`` uses
    the second vertex of edge k for eps1:k and ``"tail"`` the first vertex of
    edge k+1; tests use both to model provers forcing a broken chain.
    """
    steps = path.steps
    ell = len(steps)
    head = [pg.vertex_scalar(s.head) for s in steps]
    tail = [pg.vertex_scalar(s.tail) for s in steps]
    if align == "head":
        mid = head[:-1]
    elif align == "tail":
        mid = tail[1:]
    else:
        raise ValueError("align must be 'head' or 'tail'")
    eps1 = tuple(r_path * w % P for w in mid)
    eps0 = tuple(r_path * tail[k - 1] * head[k - 1] % P for k in range(2, ell))
    return EpsilonSchedule(r_path % P, eps1, eps0)


# proof object


@dataclass(frozen=True)
class ConnectionProof:
    statement: PathStatement
    graph_witnesses: tuple
    path_witnesses: tuple
    v_prime: object
    partials: tuple
    announcements: tuple
    challenge: int
    responses: tuple[int, ...]

    def to_bytes(self) -> bytes:
        st = self.statement
        w = (Writer(b"THPF").raw(st.digest()).u16(st.length).u32(st.n_vertices).u32(st.n_edges)
             .blob(st.to_bytes()))
        wit = Writer(b"WITN")
        for e in self.graph_witnesses + self.path_witnesses + (self.v_prime,):
            wit.point(e)
        part = Writer(b"PART")
        for e in self.partials:
            part.point(e)
        ann = Writer(b"ANNC")
        for e in self.announcements:
            ann.point(e)
        resp = Writer(b"RESP")
        for x in self.responses:
            resp.scalar(x)
        w.blob(wit.getvalue()).blob(part.getvalue()).blob(ann.getvalue())
        w.blob(pg.encode_scalar(self.challenge)).blob(resp.getvalue())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> ConnectionProof:
        r = Reader(data, b"THPF")
        st_hash, length, nv, ne = r.take(32), r.u16(), r.u32(), r.u32()
        st = PathStatement.from_bytes(r.blob())
        if st.digest() != st_hash or (st.length, st.n_vertices, st.n_edges) != (length, nv, ne):
            raise MalformedError("proof header does not match its statement")
        if length < 1 or st.n_graph_witnesses < 0:
            raise MalformedError("impossible statement sizes")
        wit = Reader(r.blob(), b"WITN")
        gw = tuple(wit.g1() for _ in range(st.n_graph_witnesses))
        pw = tuple(wit.g1() for _ in range(length))
        vp = wit.g1()
        wit.done()
        part = Reader(r.blob(), b"PART")
        partials = tuple(part.gt() for _ in range(length + 1))
        part.done()
        ann = Reader(r.blob(), b"ANNC")
        announcements = tuple(ann.g2() if kind == "G2" else ann.gt() for _, kind in relation_layout(st))
        ann.done()
        ch = r.blob()
        challenge = pg.decode_scalar(ch)
        resp = Reader(r.blob(), b"RESP")
        responses = tuple(resp.scalar() for _ in variable_names(st))
        resp.done()
        r.done()
        return cls(st, gw, pw, vp, partials, announcements, challenge, responses)

    def element_counts(self) -> dict[str, int]:
        return {
            "graph_witnesses": len(self.graph_witnesses),
            "path_witnesses": len(self.path_witnesses),
            "partials": len(self.partials),
            "announcements": len(self.announcements),
            "responses": len(self.responses),
        }


# shape of the statement: variables and relations


def variable_names(st: PathStatement) -> list[str]:
    ell = st.length
    names: list[str] = []
    if st.source_hidden:
        names += ["xs", "alpha", "beta"]
    if st.terminal_hidden:
        names += ["xt", "delta", "mu"]
    names.append("eps2")
    names += [f"eps1:{k}" for k in range(1, ell)]
    names += [f"eps0:{k}" for k in range(2, ell)]
    if _uses_q(st):
        names.append("q")
    if ell > 1 and st.terminal_hidden:
        names.append("z")
    if ell == 1 and st.source_hidden and st.terminal_hidden:
        names += ["eps11", "nu"]
    names += [f"kappa:{k}" for k in range(1, ell + 1)]
    n = st.n_graph_witnesses
    names += [f"g1:{j}" for j in range(n)]
    names += [f"g0:{j}" for j in range(n)]
    names += ["kappa:g", "zeta", "rho", "omega", "tau"]
    return names


def _uses_q(st: PathStatement) -> bool:
    if st.length == 1:
        return st.source_hidden or st.terminal_hidden
    return st.source_hidden


def relation_layout(st: PathStatement) -> list[tuple[str, str]]:
    """(group, announcement group) for every relation, in transcript order."""
    out = []
    if st.source_hidden:
        out += [("commitment:source", "G2")] * 2
    if st.terminal_hidden:
        out += [("commitment:terminal", "G2")] * 2
    if st.length == 1 and st.source_hidden and st.terminal_hidden:
        out.append(("path:1", "G2"))
    out += [(f"path:{k}", "GT") for k in range(1, st.length + 1)]
    out += [("graph", "GT"), ("signature", "GT")]
    return out


def _blinding_base(pp: PublicParameters):
    if "B" not in pp._cache:
        pp._cache["B"] = pp.g1.pair(pp.f)
    return pp._cache["B"]


def path_terms(pp: PublicParameters, st: PathStatement, k: int) -> list[tuple[object, str, int]]:
    """G2 terms (base, variable, coefficient) of the pairing at position k."""
    ell = st.length
    X00, X01, X02 = pp.X[0][0], pp.X[0][1], pp.X[0][2]
    src, term = st.source, st.terminal
    xs = None if st.source_hidden else pg.vertex_scalar(src)
    xt = None if st.terminal_hidden else pg.vertex_scalar(term)
    terms: list[tuple[object, str, int]] = [(X02, "eps2", 1)]
    if ell == 1:
        terms.append((src.first, "eps2", 1) if xs is None else (X01, "eps2", xs))
        terms.append((term.first, "eps2", 1) if xt is None else (X01, "eps2", xt))
        if xs is not None and xt is not None:
            terms.append((X00, "eps2", xs * xt % P))
        elif xs is not None:
            terms.append((term.second, "eps2", xs))
        elif xt is not None:
            terms.append((src.second, "eps2", xt))
        else:
            terms.append((src.second, "eps11", 1))
        if _uses_q(st):
            terms.append((pp.f, "q", 1))
        return terms
    if k == 1:
        terms.append((src.first, "eps2", 1) if xs is None else (X01, "eps2", xs))
        terms.append((X01, "eps1:1", 1))
        terms.append((src.second, "eps1:1", 1) if xs is None else (X00, "eps1:1", xs))
        if xs is None:
            terms.append((pp.f, "q", 1))
    elif k < ell:
        terms.append((X01, f"eps1:{k - 1}", 1))
        terms.append((X01, f"eps1:{k}", 1))
        terms.append((X00, f"eps0:{k}", 1))
    else:
        terms.append((X01, f"eps1:{ell - 1}", 1))
        terms.append((term.first, "eps2", 1) if xt is None else (X01, "eps2", xt))
        terms.append((term.second, f"eps1:{ell - 1}", 1) if xt is None else (X00, f"eps1:{ell - 1}", xt))
        if xt is None:
            terms.append((pp.f, "z", 1))
    return terms


def _g2_eval(terms, w: Mapping[str, int]):
    return pg.g2_multiexp([b for b, _, _ in terms], [coef * w[v] for _, v, coef in terms])


def _relations(pp: PublicParameters, pk: AuditorPublicKey, st: PathStatement, graph_w: Sequence,
               path_w: Sequence, v_prime, partials: Sequence) -> list[sigma.Relation]:
    """Relations in layout order. ``partials`` = (P_graph, P_1, ..., P_length)."""
    X00, X01, f = pp.X[0][0], pp.X[0][1], pp.f
    B = _blinding_base(pp)
    ell = st.length
    rels: list[sigma.Relation] = []

    def commit_rels(pair: CommitmentPair, x: str, r1: str, r2: str, group: str):
        rels.append(sigma.Relation(group, (x, r1),
                                   lambda w: X01 ** w[x] * f ** w[r1], pair.first))
        rels.append(sigma.Relation(group, (x, r2),
                                   lambda w: X00 ** w[x] * f ** w[r2], pair.second))

    if st.source_hidden:
        commit_rels(st.source, "xs", "alpha", "beta", "commitment:source")
    if st.terminal_hidden:
        commit_rels(st.terminal, "xt", "delta", "mu", "commitment:terminal")
    if ell == 1 and st.source_hidden and st.terminal_hidden:
        C4 = st.terminal.second
        rels.append(sigma.Relation("path:1", ("eps2", "eps11", "nu"),
                                   lambda w: C4 ** w["eps2"] * X00 ** (-w["eps11"] % P) * f ** (-w["nu"] % P),
                                   G2.neutral_element()))
    for k in range(1, ell + 1):
        terms = path_terms(pp, st, k)
        Wk = path_w[k - 1]

        def phi_k(w, terms=terms, Wk=Wk, k=k):
            return Wk.pair(_g2_eval(terms, w)) * B ** w[f"kappa:{k}"]

        names = tuple(dict.fromkeys([v for _, v, _ in terms] + [f"kappa:{k}"]))
        rels.append(sigma.Relation(f"path:{k}", names, phi_k, partials[k]))
    n = len(graph_w)

    def phi_g(w):
        left = pg.g1_multiexp(graph_w, [w[f"g1:{j}"] for j in range(n)])
        right = pg.g1_multiexp(graph_w, [w[f"g0:{j}"] for j in range(n)])
        return pg.pairing_product([(left, X01), (right, X00)]) * B ** w["kappa:g"]

    gnames = tuple([f"g1:{j}" for j in range(n)] + [f"g0:{j}" for j in range(n)] + ["kappa:g"])
    rels.append(sigma.Relation("graph", gnames, phi_g, partials[0]))

    def phi_sig(w):
        base = pp.h ** w["zeta"] * pp.b ** w["rho"] * pp.c ** w["omega"] * v_prime ** (-w["tau"] % P)
        kap = -(w["kappa:g"] + sum(w[f"kappa:{k}"] for k in range(1, ell + 1))) % P
        return base.pair(X00) * B ** kap

    denom = GT.neutral_element()
    for part in partials:
        denom = denom * part
    target = v_prime.pair(pk.X) * denom.inverse()
    snames = ("zeta", "rho", "omega", "tau", "kappa:g") + tuple(f"kappa:{k}" for k in range(1, ell + 1))
    rels.append(sigma.Relation("signature", snames, phi_sig, target))
    return rels


def _challenge(pp, pk, st, graph_w, path_w, v_prime, partials, announcements) -> int:
    tr = sigma.Transcript(DOMAIN)
    tr.append(b"pp", pp.digest())
    tr.append(b"auditor", pk.key_id)
    tr.append(b"statement", st.to_bytes())
    tr.append_points(b"graph-witnesses", graph_w)
    tr.append_points(b"path-witnesses", path_w)
    tr.append_points(b"v-prime", [v_prime])
    tr.append_points(b"partials", partials)
    tr.append_points(b"announcements", announcements)
    return tr.challenge()


# prover


def prove_connected(pp: PublicParameters, pk: AuditorPublicKey, signature: GraphSignature,
                    holder: HolderKey, graph: Multigraph, commitment: GraphCommitment, path: Path, *,
                    source: EndpointCommitments | None = None,
                    terminal: EndpointCommitments | None = None,
                    length: int | None = None,
                    rng: random.Random | None = None,
                    strict: bool = True,
                    schedule: EpsilonSchedule | None = None) -> ConnectionProof:
    """Prove that ``path`` exists in the signed ``graph``.

    ``source``/``terminal``, when given, hide that endpoint behind the
    commitment pair and the prover must hold its opening. With ``strict``
    every precondition is checked first and ``ProofRefused`` is raised
    before any transcript exists; ``strict=False`` and an explicit
    ``schedule`` exist so tests can model misbehaving provers.
    """
    rng = rng or pg.system_rng()
    ell = path.padded_length
    if strict:
        _precheck(pp, pk, signature, holder, graph, commitment, path, source, terminal, length)
    elif length is not None and length != ell:
        raise ProofRefused(f"path has {ell} steps, statement says {length}")

    st = PathStatement(
        ell,
        source.pair if source else path.source,
        terminal.pair if terminal else path.terminal,
        pk.key_id, pp.digest(), graph.n, graph.m)
    r_path = pg.random_scalar(rng)
    sched = schedule or build_epsilon_schedule(path, r_path)
    sr = randomize(signature, holder, rng)
    r = sr.r

    # witnesses for path positions
    path_keys = set()
    path_w = []
    for step in path.steps:
        e = step.edge
        path_keys.add(e.key)
        rest = element_messages(e)[2:]
        exp = commitment.openings[e.key] * r * pow(sched.eps2, -1, P) % P
        path_w.append(encode_messages(pp, commitment.indices[e.key], rest) ** exp)

    # witnesses for every other element
    graph_entries = []
    for elem in graph.elements():
        if elem.key in path_keys:
            continue
        msgs = element_messages(elem)
        lead, rest = msgs[0], msgs[1:]
        r_e = pg.random_scalar(rng)
        exp = commitment.openings[elem.key] * r * pow(r_e, -1, P) % P
        W = encode_messages(pp, commitment.indices[elem.key], rest) ** exp
        graph_entries.append((pg.encode_point(W), W, r_e, r_e * lead % P))
    graph_entries.sort(key=lambda t: t[0])
    graph_w = [t[1] for t in graph_entries]

    witness: dict[str, int] = {}
    if source:
        op = source.opening
        witness.update(xs=op.x, alpha=op.r1, beta=op.r2)
    if terminal:
        op = terminal.opening
        witness.update(xt=op.x, delta=op.r1, mu=op.r2)
    witness["eps2"] = sched.eps2
    for k in range(1, ell):
        witness[f"eps1:{k}"] = sched.eps1_at(k)
    for k in range(2, ell):
        witness[f"eps0:{k}"] = sched.eps0_at(k)
    if ell == 1:
        q = 0
        if source:
            q += source.opening.r1 * sched.eps2
        if terminal:
            q += terminal.opening.r1 * sched.eps2
        if source and terminal:
            eps11 = sched.eps2 * terminal.opening.x % P
            witness["eps11"] = eps11
            witness["nu"] = terminal.opening.r2 * sched.eps2 % P
            q += source.opening.r2 * eps11
        elif source:
            q += source.opening.r2 * sched.eps2 * pg.vertex_scalar(path.terminal)
        elif terminal:
            q += terminal.opening.r2 * sched.eps2 * pg.vertex_scalar(path.source)
        if source or terminal:
            witness["q"] = -q % P
    else:
        if source:
            witness["q"] = -(source.opening.r1 * sched.eps2 + source.opening.r2 * sched.eps1_at(1)) % P
        if terminal:
            witness["z"] = -(terminal.opening.r1 * sched.eps2
                             + terminal.opening.r2 * sched.eps1_at(ell - 1)) % P
    for k in range(1, ell + 1):
        witness[f"kappa:{k}"] = pg.random_scalar(rng)
    for j, t in enumerate(graph_entries):
        witness[f"g1:{j}"] = t[2]
        witness[f"g0:{j}"] = t[3]
    witness["kappa:g"] = pg.random_scalar(rng)
    witness.update(zeta=sr.zeta, rho=sr.rho, omega=sr.omega, tau=sr.tau)

    # partials are the group relations evaluated on the witness
    B = _blinding_base(pp)
    partials = [None] * (ell + 1)
    for k in range(1, ell + 1):
        terms = path_terms(pp, st, k)
        partials[k] = path_w[k - 1].pair(_g2_eval(terms, witness)) * B ** witness[f"kappa:{k}"]
    left = pg.g1_multiexp(graph_w, [witness[f"g1:{j}"] for j in range(len(graph_w))])
    right = pg.g1_multiexp(graph_w, [witness[f"g0:{j}"] for j in range(len(graph_w))])
    partials[0] = pg.pairing_product([(left, pp.X[0][1]), (right, pp.X[0][0])]) * B ** witness["kappa:g"]

    rels = _relations(pp, pk, st, graph_w, path_w, sr.v_prime, partials)
    names = variable_names(st)
    nonces, ann = sigma.commit(rels, rng, names)
    c = _challenge(pp, pk, st, graph_w, path_w, sr.v_prime, partials, ann)
    resp = sigma.respond(nonces, witness, c)
    return ConnectionProof(st, tuple(graph_w), tuple(path_w), sr.v_prime, tuple(partials),
                           tuple(ann), c, tuple(resp[n] for n in names))


def _precheck(pp, pk, signature, holder, graph, commitment, path, source, terminal, length):
    ell = path.padded_length
    if length is not None and length != ell:
        raise ProofRefused(f"path has {ell} steps, statement says {length}")
    try:
        Path(path.steps)
    except Exception as exc:
        raise ProofRefused(f"not a valid path: {exc}") from None
    if not path.contained_in(graph):
        raise ProofRefused("path uses edges outside the signed graph")
    if ell > 0xFFFF:
        raise ProofRefused("path too long")
    v = verify_graph_signature(pp, pk, signature, holder.public, graph, commitment)
    if not v:
        raise ProofRefused(f"graph signature does not verify ({v.code})")
    for end, want, name in ((source, path.source, "source"), (terminal, path.terminal, "terminal")):
        if end is None:
            continue
        if end.opening.vertex_id != want:
            raise ProofRefused(f"{name} commitment does not open to the path {name}")
        if not verify_opening(pp, end.pair, end.opening):
            raise ProofRefused(f"{name} commitment opening is invalid")


# verifier


def _structure(pp: PublicParameters, pk: AuditorPublicKey, proof: ConnectionProof) -> str | None:
    st = proof.statement
    if st.pp_digest != pp.digest():
        return "statement made under different parameters"
    if st.auditor_key_id != pk.key_id:
        return "statement names a different auditor"
    if st.length < 1 or st.length > st.n_edges or st.n_graph_witnesses < 0:
        return "impossible statement sizes"
    if len(proof.graph_witnesses) != st.n_graph_witnesses or len(proof.path_witnesses) != st.length:
        return "witness count does not match the statement"
    if len(proof.partials) != st.length + 1:
        return "partial count does not match the statement"
    layout = relation_layout(st)
    if len(proof.announcements) != len(layout) or len(proof.responses) != len(variable_names(st)):
        return "announcement or response count does not match the statement"
    for ann, (_, kind) in zip(proof.announcements, layout):
        if kind == "G2" and not isinstance(ann, pg.G2Element) or kind == "GT" and not isinstance(ann, pg.GTElement):
            return "announcement in the wrong group"
    for W in proof.graph_witnesses + proof.path_witnesses + (proof.v_prime,):
        if not isinstance(W, pg.G1Element) or W.is_neutral_element():
            return "identity or foreign witness"
    enc = [pg.encode_point(W) for W in proof.graph_witnesses]
    if enc != sorted(enc):
        return "graph witnesses not in canonical order"
    for end in (st.source, st.terminal):
        if isinstance(end, CommitmentPair) and (end.first.is_neutral_element() or end.second.is_neutral_element()):
            return "identity endpoint commitment"
    if not st.source_hidden and not st.terminal_hidden and st.source == st.terminal:
        return "source and terminal coincide"
    return None


def verify_connected(pp: PublicParameters, pk: AuditorPublicKey, proof: ConnectionProof) -> Verdict:
    """Check every group; the reject code names the first failing one."""
    why = _structure(pp, pk, proof)
    if why:
        return Verdict.reject("structure", why)
    st = proof.statement
    c = _challenge(pp, pk, st, proof.graph_witnesses, proof.path_witnesses, proof.v_prime,
                   proof.partials, proof.announcements)
    if c != proof.challenge:
        return Verdict.reject("challenge", "transcript hash does not match the challenge")
    rels = _relations(pp, pk, st, proof.graph_witnesses, proof.path_witnesses, proof.v_prime, proof.partials)
    resp = dict(zip(variable_names(st), proof.responses))
    for rel, ann in zip(rels, proof.announcements):
        if not sigma.check(rel, ann, resp, c):
            return Verdict.reject(rel.name)
    return Verdict.accept()


def bind_shared_commitment(pp: PublicParameters, proof_a: ConnectionProof, pk_a: AuditorPublicKey,
                           proof_b: ConnectionProof, pk_b: AuditorPublicKey) -> Verdict:
    """Accept iff A's hidden terminal and B's hidden source are the same
    commitment pair, bit for bit, and both proofs verify."""
    ta, sb = proof_a.statement.terminal, proof_b.statement.source
    if not isinstance(ta, CommitmentPair) or not isinstance(sb, CommitmentPair):
        return Verdict.reject("bind", "shared endpoint must be hidden in both proofs")
    if ta.to_bytes() != sb.to_bytes():
        return Verdict.reject("bind", "proofs commit to different boundary nodes")
    for name, proof, pk in (("first", proof_a, pk_a), ("second", proof_b, pk_b)):
        v = verify_connected(pp, pk, proof)
        if not v:
            return Verdict.reject("proof", f"{name} proof rejected at {v.code}")
    return Verdict.accept()

"""MoniPoly set encoding, trusted setup and multigraph element encodings.

A message set {m_1..m_n} is encoded as the coefficients of the monic
polynomial prod(Z + m_i); placing those coefficients in the exponents of
the structured bases a_{i,k} = a_{i,0}^{x'^k} yields a_{i,0}^{prod(x' + m_i)}
without anyone but the setup holder knowing x'.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import pairing as pg
from .errors import InputError, MalformedError
from .multigraph import Edge, Multigraph, Vertex
from .pairing import G1, G2, G1Element, G2Element, P
from .wire import Reader, Writer

N_MAX_DEFAULT = 8
L_MAX_DEFAULT = 256
N_MAX_MIN = 4


def mp_encode(messages: Sequence[int]) -> list[int]:
    """Coefficients [m_0, ..., m_n] of prod(Z + m) mod p, lowest degree first.

    Accepts a multiset: loop edges repeat their vertex scalar.
    """
    msgs = list(messages)
    if not msgs:
        raise InputError("cannot encode an empty message set")
    coefs = [1]
    for m in msgs:
        m %= P
        nxt = [0] * (len(coefs) + 1)
        for k, c in enumerate(coefs):
            nxt[k] = (nxt[k] + c * m) % P
            nxt[k + 1] = (nxt[k + 1] + c) % P
        coefs = nxt
    return coefs


def poly_eval(coefs: Sequence[int], z: int) -> int:
    acc = 0
    for c in reversed(coefs):
        acc = (acc * z + c) % P
    return acc


# keys and parameters


@dataclass(frozen=True)
class IssuerSecret:
    """Auditor secrets: ``x`` signs, ``x_prime`` is the encoding trapdoor."""

    x: int
    x_prime: int

    def __post_init__(self):
        if self.x % P == 0 or self.x_prime % P == 0:
            raise InputError("issuer secrets must be nonzero mod p")

    def __repr__(self) -> str:
        return "IssuerSecret(<redacted>)"

    def public_key(self) -> AuditorPublicKey:
        return AuditorPublicKey.from_point(pg.context().g2 ** self.x)

    def to_bytes(self) -> bytes:
        return Writer(b"THSK").scalar(self.x).scalar(self.x_prime).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> IssuerSecret:
        r = Reader(data, b"THSK")
        x, xp = r.scalar(), r.scalar()
        r.done()
        try:
            return cls(x, xp)
        except InputError as exc:
            raise MalformedError(str(exc)) from None


@dataclass(frozen=True)
class AuditorPublicKey:
    X: G2Element
    key_id: bytes

    @classmethod
    def from_point(cls, X: G2Element) -> AuditorPublicKey:
        return cls(X, hashlib.sha256(b"topohide-auditor\x00" + pg.encode_point(X)).digest())

    def to_bytes(self) -> bytes:
        return Writer(b"THAP").point(self.X).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> AuditorPublicKey:
        r = Reader(data, b"THAP")
        X = r.g2()
        r.done()
        if X.is_neutral_element():
            raise MalformedError("auditor key is the identity")
        return cls.from_point(X)


@dataclass(frozen=True)
class PublicParameters:
    """Structured bases shared by every auditor and provider.

    ``a[i][k]`` in G1 and ``X[i][k]`` in G2 for element index i in 0..L_max
    and power k in 0..n_max. ``b``, ``c``, ``h`` live in G1; the endpoint
    blinding base ``f`` lives in G2 because endpoint commitments are G2
    elements that enter the second argument of pairings.
    """

    n_max: int
    L_max: int
    a: tuple[tuple[G1Element, ...], ...]
    X: tuple[tuple[G2Element, ...], ...]
    b: G1Element
    c: G1Element
    h: G1Element
    f: G2Element
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __repr__(self) -> str:
        return f"PublicParameters(n_max={self.n_max}, L_max={self.L_max}, digest={self.digest().hex()[:16]})"

    @property
    def g1(self) -> G1Element:
        return self.a[0][0]

    @property
    def g2(self) -> G2Element:
        return self.X[0][0]

    def to_bytes(self) -> bytes:
        if "bytes" not in self._cache:
            w = Writer(b"THPP").u8(pg.CURVE_CODE).u16(self.n_max).u32(self.L_max)
            for row in self.a:
                for e in row:
                    w.point(e)
            for row in self.X:
                for e in row:
                    w.point(e)
            for e in (self.b, self.c, self.h, self.f):
                w.point(e)
            self._cache["bytes"] = w.getvalue()
        return self._cache["bytes"]

    def digest(self) -> bytes:
        if "digest" not in self._cache:
            self._cache["digest"] = hashlib.sha256(b"topohide-pp\x00" + self.to_bytes()).digest()
        return self._cache["digest"]

    @classmethod
    def from_bytes(cls, data: bytes, check: bool = True) -> PublicParameters:
        r = Reader(data, b"THPP")
        curve = r.u8()
        if curve != pg.CURVE_CODE:
            raise MalformedError(f"unknown curve code {curve}")
        n_max, L_max = r.u16(), r.u32()
        if n_max < N_MAX_MIN or L_max < 1:
            raise MalformedError("parameter bounds out of range")
        expect = 4 + 2 + 1 + 2 + 4 + (L_max + 1) * (n_max + 1) * (pg.G1_BYTES + pg.G2_BYTES) \
            + 3 * pg.G1_BYTES + pg.G2_BYTES
        if len(data) != expect:
            raise MalformedError(f"parameter file has {len(data)} bytes, expected {expect}")
        a = tuple(tuple(r.g1() for _ in range(n_max + 1)) for _ in range(L_max + 1))
        X = tuple(tuple(r.g2() for _ in range(n_max + 1)) for _ in range(L_max + 1))
        b, c, h, f = r.g1(), r.g1(), r.g1(), r.g2()
        r.done()
        pp = cls(n_max, L_max, a, X, b, c, h, f)
        if check and not pp.is_consistent():
            raise MalformedError("parameters fail the pairing consistency check")
        return pp

    def is_consistent(self, rng: random.Random | None = None) -> bool:
        """Batched pairing check of the a/X structure.

        Verifies, up to a 2^-128 error, that a[i][k+1] = a[i][k]^{x'} with
        x' fixed by X[0][1], and that X[i][k] mirrors a[i][k].
        """
        if "consistent" in self._cache:
            return self._cache["consistent"]
        rng = rng or pg.system_rng()
        ok = self.a[0][0] == pg.context().g1 and self.X[0][0] == pg.context().g2
        elems = [e for row in self.a for e in row] + [e for row in self.X for e in row]
        elems += [self.b, self.c, self.h, self.f]
        ok = ok and not any(e.is_neutral_element() for e in elems)
        if ok:
            lo, hi, mirror_a, mirror_x = [], [], [], []
            for i in range(self.L_max + 1):
                for k in range(self.n_max + 1):
                    rho = rng.getrandbits(128) | 1
                    mirror_a.append(self.a[i][k] ** rho)
                    mirror_x.append(self.X[i][k] ** rho)
                    if k < self.n_max:
                        sig = rng.getrandbits(128) | 1
                        lo.append(self.a[i][k] ** sig)
                        hi.append(self.a[i][k + 1] ** sig)
            g1, g2 = self.g1, self.g2
            A_lo, A_hi = _prod(lo, G1), _prod(hi, G1)
            M_a, M_x = _prod(mirror_a, G1), _prod(mirror_x, G2)
            ok = A_hi.pair(g2) == A_lo.pair(self.X[0][1]) and M_a.pair(g2) == g1.pair(M_x)
        self._cache["consistent"] = ok
        return ok


def _prod(elems, group):
    out = group.neutral_element()
    for e in elems:
        out = out * e
    return out


def _base_family_exponent(x_prime: int, i: int) -> int:
    return 1 if i == 0 else hash_family(x_prime, i)


def hash_family(x_prime: int, i: int) -> int:
    """Per-index exponent y_i derived from the trapdoor; nonzero by rehash."""
    ctr = 0
    while True:
        y = pg.hash_to_scalar(b"base-family", pg.encode_scalar(x_prime) + i.to_bytes(4, "big") + bytes([ctr]))
        if y:
            return y
        ctr += 1


def setup(n_max: int = N_MAX_DEFAULT, L_max: int = L_MAX_DEFAULT,
          rng: random.Random | None = None) -> tuple[PublicParameters, IssuerSecret]:
    """Trusted setup: public parameters plus the first auditor's secrets.

    Base family i is a_{i,k} = g1^{y_i x'^k} with y_0 = 1 and y_i for i >= 1
    hashed from (x', i). Pass a seeded ``rng`` only in tests.
    """
    if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < N_MAX_MIN:
        raise InputError(f"n_max must be an integer >= {N_MAX_MIN}")
    if isinstance(L_max, bool) or not isinstance(L_max, int) or L_max < 1:
        raise InputError("L_max must be an integer >= 1")
    if n_max > 0xFFFF or L_max > 0xFFFFFF:
        raise InputError("parameter bounds too large")
    rng = rng or pg.system_rng()
    ctx = pg.context()
    x = pg.random_scalar(rng)
    xp = pg.random_scalar(rng)
    a_rows, X_rows = [], []
    for i in range(L_max + 1):
        y = _base_family_exponent(xp, i)
        exps = []
        cur = y
        for _ in range(n_max + 1):
            exps.append(cur)
            cur = cur * xp % P
        a_rows.append(tuple(ctx.g1 ** e for e in exps))
        X_rows.append(tuple(ctx.g2 ** e for e in exps))
    b = ctx.g1 ** pg.random_scalar(rng)
    c = ctx.g1 ** pg.random_scalar(rng)
    h = ctx.g1 ** pg.random_scalar(rng)
    f = ctx.g2 ** pg.random_scalar(rng)
    pp = PublicParameters(n_max, L_max, tuple(a_rows), tuple(X_rows), b, c, h, f)
    pp._cache["consistent"] = True
    return pp, IssuerSecret(x, xp)


def new_auditor(pp: PublicParameters, issuer: IssuerSecret, rng: random.Random | None = None) -> IssuerSecret:
    """Signing key for an additional auditor over the same structured bases.

    Proofs from two providers must bind to one endpoint commitment, which
    only works when both use the same X bases; so auditors share the
    encoding trapdoor from the common ceremony and differ in ``x``.
    """
    rng = rng or pg.system_rng()
    while True:
        x = pg.random_scalar(rng)
        if x != issuer.x:
            return IssuerSecret(x, issuer.x_prime)


# element messages and encodings


def vertex_messages(vid: str, labels: Iterable[str] = ()) -> list[int]:
    return [pg.vertex_scalar(vid)] + [pg.label_scalar(lab) for lab in sorted(set(labels))]


def edge_messages(u: str, v: str, labels: Iterable[str] = (), counter: int | None = None) -> list[int]:
    if counter is not None and u != v:
        raise InputError(f"counter on non-loop edge ({u}, {v})")
    if counter is None and u == v:
        raise InputError(f"loop at {u} needs a counter")
    msgs = [pg.vertex_scalar(u), pg.vertex_scalar(v)] + [pg.label_scalar(lab) for lab in sorted(set(labels))]
    if counter is not None:
        msgs.append(pg.counter_scalar(counter))
    return msgs


def element_messages(elem: Vertex | Edge) -> list[int]:
    if isinstance(elem, Vertex):
        return vertex_messages(elem.id, elem.labels)
    return edge_messages(elem.u, elem.v, elem.labels, elem.counter)


def split_messages(elem: Vertex | Edge) -> tuple[list[int], list[int]]:
    """(leading vertex scalars, remaining messages) as used by the proofs.

    Vertices lead with their id; edges lead with both endpoints.
    """
    msgs = element_messages(elem)
    k = 1 if isinstance(elem, Vertex) else 2
    return msgs[:k], msgs[k:]


def encode_messages(pp: PublicParameters, index: int, messages: Sequence[int]) -> G1Element:
    """prod_k a[index][k]^{m_k} for the MoniPoly coefficients m_k."""
    if not 0 <= index <= pp.L_max:
        raise InputError(f"element index {index} outside 0..{pp.L_max}")
    if len(messages) > pp.n_max:
        raise InputError(f"message set of size {len(messages)} exceeds n_max={pp.n_max}")
    if not messages:
        return pp.a[index][0]
    coefs = mp_encode(messages)
    return pg.g1_multiexp(pp.a[index][: len(coefs)], coefs)


def encode_vertex(pp: PublicParameters, vid: str, labels: Iterable[str] = (), *, index: int) -> G1Element:
    return encode_messages(pp, index, vertex_messages(vid, labels))


def encode_edge(pp: PublicParameters, u: str, v: str, labels: Iterable[str] = (),
                counter: int | None = None, *, index: int) -> G1Element:
    return encode_messages(pp, index, edge_messages(u, v, labels, counter))


def encode_element(pp: PublicParameters, elem: Vertex | Edge, index: int) -> G1Element:
    return encode_messages(pp, index, element_messages(elem))


def assign_indices(g: Multigraph, previous: Mapping[tuple, int] | None = None,
                   L_max: int | None = None) -> dict[tuple, int]:
    """Stable map from element key to base index 1..L.

    Keys already in ``previous`` keep their index, so extending a graph
    never re-indexes existing elements.
    """
    out: dict[tuple, int] = {}
    used: set[int] = set()
    previous = previous or {}
    for elem in g.elements():
        if elem.key in previous:
            out[elem.key] = previous[elem.key]
            used.add(previous[elem.key])
    nxt = 1
    for elem in g.elements():
        if elem.key in out:
            continue
        while nxt in used:
            nxt += 1
        out[elem.key] = nxt
        used.add(nxt)
    if L_max is not None and out and max(out.values()) > L_max:
        raise InputError(f"graph needs {max(out.values())} base families, parameters provide {L_max}")
    return out

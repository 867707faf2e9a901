"""Type-3 pairing context over BLS12-381, scalar hashing and fixed-width encodings.

All group arithmetic is delegated to petrelic (RELIC bindings). Everything
else in the package talks to the curve through the names exported here, so
swapping the backend means rewriting this module only.
"""

from __future__ import annotations

import hashlib
import random
import secrets
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

from petrelic.multiplicative.pairing import G1, G2, GT, G1Element, G2Element, GTElement

from .errors import InputError, MalformedError

CURVE_ID = b"BLS12-381"
CURVE_CODE = 1

P = int(G1.order())
SCALAR_BYTES = 32
G1_BYTES = 49
G2_BYTES = 97
GT_BYTES = 384

_WIDTH = {G1Element: G1_BYTES, G2Element: G2_BYTES, GTElement: GT_BYTES}
_ELEM = {G1: G1Element, G2: G2Element, GT: GTElement}


@dataclass(frozen=True)
class PairingContext:
    """The groups, their order, fixed generators and the pairing map."""

    p: int
    g1: G1Element
    g2: G2Element
    gt: GTElement

    @staticmethod
    def e(a: G1Element, b: G2Element) -> GTElement:
        return a.pair(b)


_CTX: PairingContext | None = None


def context() -> PairingContext:
    global _CTX
    if _CTX is None:
        g1, g2 = G1.generator(), G2.generator()
        _CTX = PairingContext(P, g1, g2, g1.pair(g2))
    return _CTX


# randomness


def system_rng() -> random.Random:
    """CSPRNG used by every production path."""
    return secrets.SystemRandom()


def seeded_rng(seed: int) -> random.Random:
    """Deterministic generator. Reproducible and therefore insecure; tests only."""
    return random.Random(seed)


def random_scalar(rng: random.Random | None = None) -> int:
    """Uniform scalar in [1, p)."""
    rng = rng or system_rng()
    return rng.randrange(1, P)


# hashing


def hash_to_scalar(domain_tag: bytes | str, payload: bytes | str) -> int:
    """SHA-512 of a length-prefixed domain tag and the payload, reduced mod p.

    The 512-bit digest keeps the modular bias below 2^-256.
    """
    if isinstance(domain_tag, str):
        domain_tag = domain_tag.encode()
    if isinstance(payload, str):
        payload = payload.encode()
    if not domain_tag:
        raise InputError("domain tag must be non-empty")
    h = hashlib.sha512()
    h.update(struct.pack(">H", len(domain_tag)))
    h.update(domain_tag)
    h.update(payload)
    return int.from_bytes(h.digest(), "big") % P


def vertex_scalar(vertex_id: str) -> int:
    return hash_to_scalar(b"vertex", vertex_id)


def label_scalar(label: str) -> int:
    return hash_to_scalar(b"label", label)


def counter_scalar(counter: int) -> int:
    return hash_to_scalar(b"counter", str(counter))


# pairings


def pair(a: G1Element, b: G2Element) -> GTElement:
    return a.pair(b)


def pairing_product(pairs: Sequence[tuple[G1Element, G2Element]]) -> GTElement:
    """Product of e(A_i, B_i).

    The backend has no multi-pairing, so pairs sharing a G2 argument are
    merged on the G1 side first (one pairing per distinct B_i).
    """
    if not pairs:
        raise InputError("pairing_product needs at least one pair")
    merged: dict[bytes, tuple[G1Element, G2Element]] = {}
    for a, b in pairs:
        key = b.to_binary()
        if key in merged:
            acc, _ = merged[key]
            merged[key] = (acc * a, b)
        else:
            merged[key] = (a, b)
    out = GT.neutral_element()
    for a, b in merged.values():
        if a.is_neutral_element() or b.is_neutral_element():
            continue
        out = out * a.pair(b)
    return out


def g1_multiexp(bases: Sequence[G1Element], exps: Sequence[int]) -> G1Element:
    out = G1.neutral_element()
    for b, e in zip(bases, exps):
        e %= P
        if e:
            out = out * (b ** e)
    return out


def g2_multiexp(bases: Sequence[G2Element], exps: Sequence[int]) -> G2Element:
    out = G2.neutral_element()
    for b, e in zip(bases, exps):
        e %= P
        if e:
            out = out * (b ** e)
    return out


# encodings


def encode_scalar(x: int) -> bytes:
    if not 0 <= x < P:
        raise InputError("scalar out of range")
    return x.to_bytes(SCALAR_BYTES, "little")


def decode_scalar(data: bytes) -> int:
    if len(data) != SCALAR_BYTES:
        raise MalformedError(f"scalar needs {SCALAR_BYTES} bytes, got {len(data)}")
    x = int.from_bytes(data, "little")
    if x >= P:
        raise MalformedError("non-canonical scalar")
    return x


def encode_point(elem: G1Element | G2Element | GTElement) -> bytes:
    """Fixed-width compressed encoding; the identity is all zero bytes."""
    width = _WIDTH[type(elem)]
    if elem.is_neutral_element():
        return bytes(width)
    data = elem.to_binary()
    if len(data) != width:
        raise InputError("unexpected encoding width")
    return data


def _decode(group, width: int, data: bytes):
    if len(data) != width:
        raise MalformedError(f"point needs {width} bytes, got {len(data)}")
    if data == bytes(width):
        return group.neutral_element()
    try:
        elem = _ELEM[group].from_binary(data)
    except Exception as exc:
        raise MalformedError(f"invalid point encoding: {exc}") from None
    # the backend may silently map bad input to some other element
    if not elem.is_valid() or elem.is_neutral_element() or elem.to_binary() != data:
        raise MalformedError("invalid point encoding")
    return elem


def decode_g1(data: bytes) -> G1Element:
    return _decode(G1, G1_BYTES, data)


def decode_g2(data: bytes) -> G2Element:
    return _decode(G2, G2_BYTES, data)


def decode_gt(data: bytes) -> GTElement:
    return _decode(GT, GT_BYTES, data)


def point_digest(elems: Iterable) -> bytes:
    h = hashlib.sha256()
    for e in elems:
        h.update(encode_point(e))
    return h.digest()


__all__ = [
    "CURVE_ID", "P", "G1", "G2", "GT", "G1Element", "G2Element", "GTElement",
    "PairingContext", "context", "system_rng", "seeded_rng", "random_scalar",
    "hash_to_scalar", "vertex_scalar", "label_scalar", "counter_scalar",
    "pair", "pairing_product", "g1_multiexp", "g2_multiexp",
    "encode_scalar", "decode_scalar", "encode_point", "decode_g1", "decode_g2",
    "decode_gt", "point_digest",
]
